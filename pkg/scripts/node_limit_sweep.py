#!/usr/bin/env python3
"""Sweep the node-localized integral limit against log(ac - |b|^2).

Usage:
    python scripts/node_limit_sweep.py [--grid 4]
"""

import argparse
import math

import numpy as np

from cusped_spectra.geometry import NodeMetricData
from cusped_spectra.quadrature import node_limit_check

T_SCHEDULE = (1e-6, 1e-8, 1e-10, 1e-12)
EPS_SCHEDULE = (1e-1, 1e-2)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=4, help="points per parameter axis")
    args = ap.parse_args()

    rng = np.random.default_rng(7)
    print(f"{'a':>7} {'b':>18} {'c':>7} {'limit':>12} {'closed':>12} {'error':>10}")
    worst = 0.0
    for _ in range(args.grid**2):
        a, c = rng.uniform(0.3, 5.0, size=2)
        bmax = 0.9 * math.sqrt(a * c)
        b = rng.uniform(0.0, bmax) * np.exp(1j * rng.uniform(0.0, 2 * np.pi))
        data = NodeMetricData(a, complex(b), c)
        val = node_limit_check(data, T_SCHEDULE, EPS_SCHEDULE, settle_tol=2e-3)
        err = abs(val - data.log_det)
        worst = max(worst, err)
        print(
            f"{a:7.3f} {b:18.3f} {c:7.3f} {val:12.6f} {data.log_det:12.6f} {err:10.2e}"
        )
    print(f"\nworst error: {worst:.2e}")


if __name__ == "__main__":
    main()
