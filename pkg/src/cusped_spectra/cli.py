"""Command-line interface emitting machine-readable JSON reports.

Every subcommand writes a single report object to stdout (or --out) with the
shape {command, inputs, outputs, checks, wall_time}; each check carries
{name, value, target, tolerance, pass}.  Exit code 0 iff all checks pass,
1 on failed checks, 2 on argument errors.  Reports are deterministic for a
fixed argv up to the wall_time field.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import constants, geometry, hyperbolic, quadrature, torsion, zeta
from .constants import SurfaceSignature
from .geometry import CutoffProfile, NodeMetricData, PlumbingChart
from .quadrature import RegIntegralSchedule


class RunReport:
    def __init__(self, command: str, inputs: dict):
        self.command = command
        self.inputs = inputs
        self.outputs: dict = {}
        self.checks: list[dict] = []
        self._t0 = time.monotonic()

    def check(self, name: str, value: float, target: float, tolerance: float) -> None:
        value = float(value)
        target = float(target)
        self.checks.append(
            {
                "name": name,
                "value": value,
                "target": target,
                "tolerance": float(tolerance),
                "pass": bool(abs(value - target) <= tolerance),
            }
        )

    @property
    def all_pass(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def emit(self, out_path: str | None) -> int:
        doc = {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "checks": self.checks,
            "wall_time": time.monotonic() - self._t0,
        }
        text = json.dumps(doc, sort_keys=True, indent=2, default=float)
        if out_path:
            with open(out_path, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return 0 if self.all_pass else 1


def _parse_kv(tokens: list[str]) -> dict[str, str]:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ValueError(f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        out[key] = val
    return out


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _parse_k_range(text: str) -> list[int]:
    # "k=0..5" or "0..5" or "0,1,2"
    if text.startswith("k="):
        text = text[2:]
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("CUSPED_SPECTRA_THREADS")
    return int(env) if env else 1


def _cmd_constants(args) -> int:
    ks = _parse_k_range(args.list)
    rep = RunReport("constants", {"k": ks})
    table = []
    for k in ks:
        table.append(
            {
                "k": k,
                "C": constants.big_C(k),
                "c": constants.small_c(k),
                "E": constants.E_const(k),
            }
        )
    rep.outputs["table"] = table
    rep.outputs["zeta_prime_minus_one"] = constants.zeta_prime_minus_one()
    rep.outputs["log_glaisher"] = constants.log_glaisher()
    rep.outputs["bismut_const"] = constants.bismut_const()
    for k in ks:
        r = torsion.restriction_constant_check(-k)
        rep.check(f"restriction-relation-k{k}", r.residual, 0.0, args.tol or 1e-12)
    zp = constants.zeta_prime_minus_one()
    glaisher_check = math.exp(-12.0 * zp + 1.0) - math.exp(12.0 * constants.log_glaisher())
    rep.check("glaisher-consistency", glaisher_check, 0.0, args.tol or 1e-9)
    return rep.emit(args.out)


def _cmd_spectrum(args) -> int:
    rep = RunReport(
        "spectrum",
        {
            "group": args.group,
            "cutoff": args.cutoff,
            "word_bound": args.word_bound,
        },
    )
    sp = hyperbolic.enumerate_length_spectrum(
        args.group, args.cutoff, args.word_bound, threads=_threads(args)
    )
    rep.outputs["class_count"] = sp.class_count
    rep.outputs["distinct_lengths"] = len(sp.classes)
    rep.outputs["systole"] = sp.systole
    rep.outputs["complete"] = sp.complete
    rep.outputs["certificate"] = sp.certificate
    if args.csv:
        hyperbolic.spectrum_to_csv(sp, args.csv)
        rep.outputs["csv"] = args.csv
    worst = 0.0
    for c in sp.classes:
        worst = max(worst, abs(c.length - 2.0 * math.acosh(c.trace / 2.0)))
    rep.check("trace-length-consistency", worst, 0.0, args.tol or 1e-12)
    rep.check(
        "no-parabolic-classes",
        0.0 if all(c.trace > 2.0 for c in sp.classes) else 1.0,
        0.0,
        0.0,
    )
    return rep.emit(args.out)


def _cmd_zeta(args) -> int:
    rep = RunReport(
        "zeta",
        {
            "group": args.group,
            "cutoff": args.cutoff,
            "word_bound": args.word_bound,
            "s": args.s,
        },
    )
    sp = hyperbolic.enumerate_length_spectrum(
        args.group, args.cutoff, args.word_bound, threads=_threads(args)
    )
    values = {}
    for s in _parse_float_list(args.s):
        ev = zeta.selberg_log_Z(sp, s, args.k_max)
        values[str(s)] = {
            "value": ev.value,
            "log_value": ev.log_value,
            "tail_bound": ev.tail_bound,
            "k_tail_bound": ev.k_tail_bound,
            "geodesic_tail_bound": ev.geodesic_tail_bound,
            "heuristic_tail": ev.heuristic_tail,
        }
        rep.check(
            f"exp-log-consistency-s{s}",
            abs(ev.value - math.exp(ev.log_value)),
            0.0,
            1e-12 * max(1.0, ev.value),
        )
    rep.outputs["selberg"] = values
    if args.zprime:
        est = zeta.selberg_Zprime_at_1(sp, _parse_float_list(args.h_schedule))
        rep.outputs["zprime_at_1"] = {
            "estimate": est.estimate,
            "error": est.error,
            "no_zero_detected": est.no_zero_detected,
            "low_confidence": est.low_confidence,
        }
    return rep.emit(args.out)


def _cmd_torsion(args) -> int:
    rep = RunReport(
        "torsion",
        {
            "genus": args.genus,
            "punctures": args.punctures,
            "n": args.n,
            "zeta_value": args.zeta_value,
            "log_l2": args.log_l2,
        },
    )
    sig = SurfaceSignature(args.genus, args.punctures)
    if args.n == 0:
        req = torsion.TorsionRequest.for_zprime(sig, args.zeta_value)
    else:
        req = torsion.TorsionRequest.for_z_value(sig, args.n, args.zeta_value)
    t = torsion.tz_torsion(req)
    rep.outputs["torsion"] = t
    rep.outputs["log_torsion"] = torsion.log_tz_torsion(req)
    rep.outputs["log_quillen"] = torsion.log_quillen(t, args.log_l2)
    r = torsion.restriction_constant_check(args.n)
    rep.outputs["constants"] = {
        "C": r.c_constant,
        "E": r.e_constant,
        "bismut": r.bismut_constant,
    }
    rep.check("restriction-relation", r.residual, 0.0, args.tol or 1e-12)
    return rep.emit(args.out)


def _cmd_metrics(args) -> int:
    rep = RunReport("metrics", {"kind": args.kind, "t": args.t, "r_out": args.r_out})
    cut = CutoffProfile()
    tol = args.tol or 1e-5
    if args.kind == "poincare":
        m = geometry.poincare_cusp(args.r_out)
    elif args.kind == "cylinder":
        chart = PlumbingChart(args.t)
        m = geometry.cylinder_metric(chart, 2.0 * args.t, 0.9)
    elif args.kind == "grafted":
        chart = PlumbingChart(args.t)
        m = geometry.grafted_metric(geometry.poincare_cusp(0.9), chart, cut)
    elif args.kind == "flattened":
        m = geometry.flatten(geometry.poincare_cusp(args.r_out), cut)
    elif args.kind in ("sim", "sim_ind", "kappa"):
        m = geometry.section33_densities(args.kind, PlumbingChart(args.t), cut)
    else:
        raise ValueError(f"unknown metric kind {args.kind!r}")
    rep.outputs["label"] = m.label
    rs = np.array([0.1, 0.2, 0.3])
    rep.outputs["density_samples"] = {f"{r}": float(m.density(r + 0j)) for r in rs if m.contains(r)}
    if args.kind in ("poincare", "cylinder"):
        pts = np.array([0.1 + 0.0j, 0.15 + 0.1j, 0.05 - 0.2j])
        pts = np.array([p for p in pts if m.contains(p)])
        curv = geometry.scalar_curvature(m, pts)
        rep.check("curvature-hyperbolic", float(np.max(np.abs(curv + 1.0))), 0.0, tol)
    if args.kind == "cylinder":
        r_grid = np.sqrt(args.t) * np.exp(1j * np.linspace(0, 2 * math.pi, 9)[:-1])
        lhs = m.density(r_grid)
        z1 = args.t / r_grid
        rhs = m.density(z1) * (args.t / np.abs(r_grid) ** 2) ** 2
        rep.check(
            "fiber-symmetry",
            float(np.max(np.abs(lhs / rhs - 1.0))),
            0.0,
            1e-12,
        )
    if args.kind == "poincare":
        rep.check("wolpert-scaling", geometry.wolpert_scaling(m), 0.0, 1e-6)
    if args.grid_csv:
        geometry.density_grid_csv(m, args.grid_csv)
        rep.outputs["grid_csv"] = args.grid_csv
    return rep.emit(args.out)


def _green_integrand(cut: CutoffProfile):
    kap = geometry.kappa_cusp_tangent_density(cut)

    def f(z):
        z = np.asarray(z, dtype=complex)
        return np.log(np.abs(z)) * geometry.c1_density(kap.log_density, z)

    return f


def _cmd_reg_integral(args) -> int:
    schedule_text = args.schedule or args.schedule_global
    rep = RunReport("reg-integral", {"case": args.case, "schedule": schedule_text})
    eps = _parse_float_list(schedule_text) if schedule_text else tuple(
        10.0 ** (-3 - 0.75 * k) for k in range(5)
    )
    sched = RegIntegralSchedule(eps)
    tol = args.tol or 1e-3
    if args.case == "green":
        res = quadrature.regularized_integral(
            _green_integrand(CutoffProfile()), [0.0], sched, 0.5
        )
        rep.check("finite-part", res.finite_part, 1.0, tol)
        worst = max(
            abs(raw - (1.0 - math.log(-math.log(e)))) for e, raw in res.per_epsilon
        )
        rep.check("epsilon-profile", worst, 0.0, tol)
    elif args.case == "cusp-pole":
        def f(z):
            r = np.abs(np.asarray(z))
            return 1.0 / (math.pi * r**2 * np.abs(np.log(r)))

        res = quadrature.regularized_integral(f, [0.0], sched, 0.5)
        rep.check("finite-part", res.finite_part, -2.0 * math.log(math.log(2.0)), tol)
        rep.check("cusp-coefficient", res.cusp_coefficient, -1.0 / (2.0 * math.pi), tol)
    else:
        raise ValueError(f"unknown case {args.case!r}")
    rep.outputs["finite_part"] = res.finite_part
    rep.outputs["cusp_coefficient"] = res.cusp_coefficient
    rep.outputs["per_epsilon"] = [[e, raw] for e, raw in res.per_epsilon]
    rep.outputs["error_estimate"] = res.error_estimate
    return rep.emit(args.out)


def _cmd_identities(args) -> int:
    tol = args.tol or 1e-3
    if args.double_integral is not None:
        kv = _parse_kv(args.double_integral)
        a, b, c = float(kv["a"]), float(kv["b"]), float(kv["c"])
        rep = RunReport("identities", {"case": "double-integral", "a": a, "b": b, "c": c})
        numeric, closed = quadrature.double_integral_identity(a, b, c)
        rep.outputs["numeric"] = numeric
        rep.outputs["closed_form"] = closed
        rep.check("double-integral", numeric, closed, tol)
    elif args.radial:
        rep = RunReport("identities", {"case": "radial"})
        v1, v2 = quadrature.node_profile_integrals()
        rep.outputs["bare"] = v1
        rep.outputs["log_weighted"] = v2
        rep.check("radial-bare", v1, -2.0, args.tol or 1e-6)
        rep.check("radial-log-weighted", v2, -2.0, args.tol or 1e-6)
    elif args.node is not None:
        kv = _parse_kv(args.node)
        a, b, c = float(kv["a"]), complex(kv["b"]), float(kv["c"])
        rep = RunReport(
            "identities", {"case": "node", "a": a, "b": str(b), "c": c}
        )
        data = NodeMetricData(a, b, c)
        ts = _parse_float_list(kv.get("t_schedule", "1e-6,1e-8,1e-10,1e-12"))
        es = _parse_float_list(kv.get("eps_schedule", "1e-1,1e-2"))
        val = quadrature.node_limit_check(data, ts, es)
        rep.outputs["limit"] = val
        rep.outputs["closed_form"] = data.log_det
        rep.check("node-limit", val, data.log_det, tol)
    elif args.cylinder is not None:
        kv = _parse_kv(args.cylinder)
        t = float(kv["t"])
        rep = RunReport("identities", {"case": "cylinder", "t": t})
        r = quadrature.cylinder_decomposition_check(t)
        rep.outputs["lhs"] = r.lhs
        rep.outputs["log_t_coefficient"] = r.log_t_coefficient
        rep.outputs["finite_coefficient"] = r.finite_coefficient
        rep.check("log-coefficient", r.log_t_coefficient, -2.0, 5e-3)
        rep.check("finite-coefficient", r.finite_coefficient, -2.0, 5e-3)
        rep.check("decomposition-consistency", r.consistency, 0.0, 1e-6)
    else:
        print("identities: choose one of --double-integral/--radial/--node/--cylinder", file=sys.stderr)
        return 2
    return rep.emit(args.out)


def _cmd_verify_all(args) -> int:
    fast = args.fast
    rep = RunReport("verify-all", {"fast": fast})
    rng = np.random.default_rng(20240817)

    # constants
    for k in range(0, 6):
        r = torsion.restriction_constant_check(-k)
        rep.check(f"restriction-relation-k{k}", r.residual, 0.0, 1e-12)
    sig_identity_worst = 0.0
    for k in (0, 3, 7) if fast else range(0, 21, 2):
        for g in (0, 5) if fast else (0, 3, 9, 20):
            for m in (1, 3) if fast else (0, 2, 11, 20):
                lhs = constants.log_B_factor(k, SurfaceSignature(g + m, 0))
                rhs = constants.log_B_factor(k, SurfaceSignature(g, m)) + m * constants.log_B_factor(
                    k, SurfaceSignature(1, 1)
                )
                sig_identity_worst = max(
                    sig_identity_worst, abs(lhs - rhs) / max(1.0, abs(lhs))
                )
    rep.check("b-factor-multiplicativity", sig_identity_worst, 0.0, 1e-12)

    # radial canaries
    v1, v2 = quadrature.node_profile_integrals()
    rep.check("radial-bare", v1, -2.0, 1e-6)
    rep.check("radial-log-weighted", v2, -2.0, 1e-6)

    # double integral
    n_triples = 5 if fast else 20
    worst = 0.0
    count = 0
    while count < n_triples:
        a, b, c = rng.uniform(0.1, 10.0, size=3)
        if a * c - b * b <= 0.05 * a * c:
            continue
        numeric, closed = quadrature.double_integral_identity(a, b, c)
        worst = max(worst, abs(numeric - closed))
        count += 1
    numeric0, closed0 = quadrature.double_integral_identity(1.0, 0.0, 1.0)
    rep.check("double-integral-random", worst, 0.0, 1e-3)
    rep.check("double-integral-trivial", numeric0, 0.0, 1e-9)

    # green regularized integral
    eps = tuple(10.0 ** (-3 - 0.6 * k) for k in range(4 if fast else 5))
    res = quadrature.regularized_integral(
        _green_integrand(CutoffProfile()), [0.0], RegIntegralSchedule(eps), 0.5
    )
    rep.check("green-finite-part", res.finite_part, 1.0, 1e-3)
    worst = max(abs(raw - (1.0 - math.log(-math.log(e)))) for e, raw in res.per_epsilon)
    rep.check("green-profile", worst, 0.0, 1e-3)

    # node limits
    ts = (1e-6, 1e-8, 1e-10, 1e-12)
    es = (1e-1, 1e-2)
    base = None
    for a, b, c in ((2.0, 0.0, 1.0), (1.0, 0.5, 1.0)):
        data = NodeMetricData(a, b, c)
        val = quadrature.node_limit_check(data, ts, es)
        rep.check(f"node-limit-{a}-{b}-{c}", val, data.log_det, 1e-3)
        base = val
    rot = quadrature.node_limit_check(
        NodeMetricData(1.0, 0.5 * complex(math.cos(1.1), math.sin(1.1)), 1.0), ts, es
    )
    rep.check("node-phase-invariance", abs(base - rot), 0.0, 1e-6)

    # geometry
    pc = geometry.poincare_cusp(0.5)
    pts = (0.05 + 0.02j) * np.exp(1j * np.linspace(0, 2, 5)) + 0.1
    curv = geometry.scalar_curvature(pc, pts)
    rep.check("poincare-curvature", float(np.max(np.abs(curv + 1.0))), 0.0, 1e-5)
    chart = PlumbingChart(1e-4)
    cyl = geometry.cylinder_metric(chart, 2e-4, 0.9)
    curv_c = geometry.scalar_curvature(cyl, pts)
    rep.check("cylinder-curvature", float(np.max(np.abs(curv_c + 1.0))), 0.0, 1e-5)
    r_grid = 1e-2 * np.exp(1j * np.linspace(0, 2 * math.pi, 17)[:-1])
    sym = np.max(
        np.abs(
            cyl.density(r_grid)
            / (cyl.density(1e-4 / r_grid) * (1e-4 / np.abs(r_grid) ** 2) ** 2)
            - 1.0
        )
    )
    rep.check("cylinder-symmetry", float(sym), 0.0, 1e-12)
    dens2 = geometry.ChartMetric(
        0.0,
        0.5,
        lambda z: 1.0 / (np.abs(z) * (np.log(np.abs(z)) + math.log(2.0))) ** 2,
        "rescaled-cusp",
    )
    rep.check("wolpert-log2", geometry.wolpert_scaling(dens2), math.log(2.0), 1e-3)

    # spectrum + selberg zeta
    bound = 6 if fast else 8
    sp8 = hyperbolic.enumerate_length_spectrum(
        "thrice_punctured_sphere", 8.0, bound, threads=_threads(args)
    )
    sp10 = hyperbolic.enumerate_length_spectrum(
        "thrice_punctured_sphere", 10.0, bound, threads=_threads(args)
    )
    rep.check("systole", sp8.systole, 2.0 * math.acosh(3.0), 1e-12)
    for s in (2.0, 3.0):
        e8 = zeta.selberg_log_Z(sp8, s)
        e10 = zeta.selberg_log_Z(sp10, s)
        dz = abs(e8.value - e10.value)
        rep.check(f"zeta-stability-s{s}", dz, 0.0, args.tol or 1e-6)
        rep.check(
            f"zeta-tail-dominates-s{s}", 0.0 if dz <= e8.tail_bound else 1.0, 0.0, 0.0
        )
    empty = hyperbolic.enumerate_length_spectrum("thrice_punctured_sphere", 0.5, 3)
    rep.check("empty-spectrum-z", zeta.selberg_log_Z(empty, 2.0).value, 1.0, 0.0)

    # spectral zeta determinants
    n_circ = 40 if fast else 80
    eigs = zeta.EigenvalueList(
        tuple(sorted([n * n for n in range(1, n_circ + 1)] * 2)),
        1,
        ((math.sqrt(math.pi), -0.5), (-1.0, 0.0)),
    )
    _zp0, logdet = zeta.zeta_prime_zero_det(eigs)
    rep.check("circle-determinant", math.exp(logdet), 4.0 * math.pi**2, 1e-8)
    M = 20 if fast else 34
    evs = sorted(
        m * m + n * n
        for m in range(-M, M + 1)
        for n in range(-M, M + 1)
        if (m, n) != (0, 0) and m * m + n * n <= M * M
    )
    tor = zeta.EigenvalueList(tuple(evs), 1, ((math.pi, -1.0), (-1.0, 0.0)))
    _zp0t, logdett = zeta.zeta_prime_zero_det(tor)
    eta_i = math.exp(-math.pi / 12) * float(
        np.prod([1.0 - math.exp(-2.0 * math.pi * n) for n in range(1, 40)])
    )
    rep.check("torus-determinant", math.exp(logdett), 4.0 * math.pi**2 * eta_i**4, 1e-6)
    scale = 2.7
    zp_scaled, _ = zeta.zeta_prime_zero_det(tor.rescaled(scale))
    zp_base, _ = zeta.zeta_prime_zero_det(tor)
    rep.check(
        "eigenvalue-scaling",
        zp_scaled - (zp_base - math.log(scale) * zeta.mellin_zeta(tor, 0.0)),
        0.0,
        1e-9,
    )

    # anomaly chart
    pc9 = geometry.poincare_cusp(0.9)
    rep.check(
        "anomaly-equal-inputs",
        quadrature.anomaly_rhs_chart(pc9, pc9, None, None, 0, 0.05, 0.8),
        0.0,
        1e-10,
    )
    bumps = ((0.8, 0.15, 0.55),) if fast else ((0.8, 0.15, 0.55), (-0.5, 0.2, 0.7), (1.2, 0.1, 0.35))
    from scipy.integrate import quad as _quad

    for amp, r_lo, r_hi in bumps:
        def phi_r(r, amp=amp, r_lo=r_lo, r_hi=r_hi):
            x = np.clip((np.asarray(r) - r_lo) / (r_hi - r_lo) * 2.0 - 1.0, -1.0, 1.0)
            return amp * (1.0 - x * x) ** 4

        def lam2(z, phi_r=phi_r):
            return pc9.density(z) * np.exp(2.0 * phi_r(np.abs(np.asarray(z))))

        m2 = geometry.ChartMetric(0.0, 0.9, lam2, "conformal-bump")
        val = quadrature.anomaly_rhs_chart(pc9, m2, None, None, 0, 0.05, 0.8)
        i1 = _quad(
            lambda r: phi_r(r) / (2.0 * math.pi * (r * np.log(r)) ** 2) * 2.0 * math.pi * r,
            r_lo,
            r_hi,
            limit=200,
        )[0]
        i2 = _quad(
            lambda r: ((phi_r(r + 1e-6) - phi_r(r - 1e-6)) / 2e-6) ** 2 * 2.0 * math.pi * r,
            r_lo,
            r_hi,
            limit=200,
        )[0]
        oracle = (2.0 * i1 - i2 / (2.0 * math.pi)) / 6.0
        rep.check(f"anomaly-green-{amp}", val, oracle, 1e-4)

    return rep.emit(args.out)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cusped-spectra",
        description="numerical checks for cusped hyperbolic metrics and their invariants",
        allow_abbrev=False,
    )
    parser.add_argument("--out", default=None, help="write the JSON report to this path")
    parser.add_argument("--threads", type=int, default=None, help="worker cap (env CUSPED_SPECTRA_THREADS)")
    parser.add_argument("--tol", type=float, default=None, help="override the default check tolerance")
    parser.add_argument(
        "--schedule",
        dest="schedule_global",
        metavar="SCHEDULE",
        default=None,
        help="comma-separated cut radii for schedule-driven subcommands",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("constants", help="universal constant tables and consistency checks")
    p.add_argument("--list", default="0..5", help="k range, e.g. k=0..5")
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("spectrum", help="geodesic length spectrum of a preset group")
    p.add_argument("--group", default="thrice_punctured_sphere", choices=hyperbolic.PRESET_IDS)
    p.add_argument("--cutoff", type=float, default=8.0)
    p.add_argument("--word-bound", type=int, default=8)
    p.add_argument("--csv", default=None, help="write the spectrum as CSV")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("zeta", help="truncated Selberg zeta values")
    p.add_argument("--group", default="thrice_punctured_sphere", choices=hyperbolic.PRESET_IDS)
    p.add_argument("--cutoff", type=float, default=10.0)
    p.add_argument("--word-bound", type=int, default=8)
    p.add_argument("--s", default="2,3")
    p.add_argument("--k-max", type=int, default=64)
    p.add_argument("--zprime", action="store_true", help="estimate Z'(1)")
    p.add_argument("--h-schedule", default="0.4,0.2,0.1")
    p.set_defaults(func=_cmd_zeta)

    p = sub.add_parser("torsion", help="torsion from a signature and zeta input")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--punctures", type=int, required=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--zeta-value", type=float, required=True)
    p.add_argument("--log-l2", type=float, default=0.0)
    p.set_defaults(func=_cmd_torsion)

    p = sub.add_parser("metrics", help="model chart metrics and their local checks")
    p.add_argument(
        "--kind",
        default="poincare",
        choices=("poincare", "cylinder", "grafted", "flattened", "sim", "sim_ind", "kappa"),
    )
    p.add_argument("--t", type=float, default=1e-4)
    p.add_argument("--r-out", type=float, default=0.5)
    p.add_argument("--grid-csv", default=None)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("reg-integral", help="regularized integrals with log|log eps| fits")
    p.add_argument("--case", default="green", choices=("green", "cusp-pole"))
    p.add_argument("--schedule", default=None, help="comma-separated cut radii")
    p.set_defaults(func=_cmd_reg_integral)

    p = sub.add_parser("identities", help="closed-form integral identities")
    p.add_argument("--double-integral", nargs="*", default=None, metavar="K=V")
    p.add_argument("--radial", action="store_true")
    p.add_argument("--node", nargs="*", default=None, metavar="K=V")
    p.add_argument("--cylinder", nargs="*", default=None, metavar="K=V")
    p.set_defaults(func=_cmd_identities)

    p = sub.add_parser("verify-all", help="run the full verification battery")
    p.add_argument("--fast", action="store_true", help="reduced schedules")
    p.set_defaults(func=_cmd_verify_all)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
