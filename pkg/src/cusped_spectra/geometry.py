"""Model conformal metrics on punctured/annular charts.

A metric is carried as a conformal density lambda with ds^2 = lambda |dz|^2.
All densities are vectorized over numpy arrays of complex points.  Curvature
and first-Chern densities are evaluated by five-point finite-difference
stencils with a step proportional to |z|, since the model densities vary on
scale |z| near the puncture.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

REL_STEP = 1e-4  # finite-difference step, relative to |z|


class ChartError(ValueError):
    pass


def smoothstep7(x):
    """Seventh-order smoothstep: 0 below 0, 1 above 1, C^3 at both ends."""
    x = np.clip(x, 0.0, 1.0)
    return x**4 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)))


@dataclass(frozen=True)
class CutoffProfile:
    """Monotone profile nu0 with nu0 = 0 below 1/2 and nu0 = 1 above 3/4."""

    name: str = "smoothstep7"
    nu0: Callable = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.nu0 is None:
            object.__setattr__(
                self, "nu0", lambda u: smoothstep7((np.asarray(u, dtype=float) - 0.5) * 4.0)
            )

    def nu(self, z0, z1):
        """Interpolation weight 1 - nu0(|z0|^2 + |z1|^2): 1 near the node."""
        u = np.abs(z0) ** 2 + np.abs(z1) ** 2
        return 1.0 - self.nu0(u)

    def nu_tilde(self, z0, z1):
        """Same with nu0(4 .): plateaus pulled twice as close to the node."""
        u = np.abs(z0) ** 2 + np.abs(z1) ** 2
        return 1.0 - self.nu0(4.0 * u)


@dataclass(frozen=True)
class PlumbingChart:
    """Coordinates (z0, z1) with z0 z1 = t on the fiber, |t| < 1."""

    t: complex

    def __post_init__(self) -> None:
        if abs(self.t) >= 1.0:
            raise ChartError("plumbing parameter must satisfy |t| < 1")

    def z1(self, z0):
        if self.t == 0:
            return np.zeros_like(np.asarray(z0))
        return self.t / np.asarray(z0)


@dataclass(frozen=True)
class NodeMetricData:
    """Hermitian metric values (a, b, c) at a node; positive definite."""

    a: float
    b: complex
    c: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.c > 0):
            raise ChartError("diagonal entries must be positive")
        if self.a * self.c - abs(self.b) ** 2 <= 0:
            raise ChartError("metric must be positive definite: ac - |b|^2 > 0")

    @property
    def log_det(self) -> float:
        return math.log(self.a * self.c - abs(self.b) ** 2)


@dataclass(frozen=True)
class ChartMetric:
    """Conformal density lambda(z) on {r_in < |z| < r_out}."""

    r_in: float
    r_out: float
    density: Callable
    label: str
    coordinate: str = "z"

    def __post_init__(self) -> None:
        if not (0.0 <= self.r_in < self.r_out):
            raise ChartError("need 0 <= r_in < r_out")

    def __call__(self, z):
        return self.density(z)

    def contains(self, z) -> bool:
        r = abs(complex(z))
        return self.r_in < r < self.r_out

    def log_density(self, z):
        return np.log(self.density(z))


def poincare_cusp(r_out: float) -> ChartMetric:
    """Cusp model density 1/(|z| log|z|)^2 on the punctured disc."""
    if not (0.0 < r_out < 1.0):
        raise ChartError("poincare cusp needs 0 < r_out < 1 (log vanishes at 1)")

    def density(z):
        r = np.abs(np.asarray(z))
        return 1.0 / (r * np.log(r)) ** 2

    return ChartMetric(0.0, r_out, density, "poincare")


def _cylinder_density(t_abs: float):
    if t_abs == 0.0:
        def density(z):
            r = np.abs(np.asarray(z))
            return 1.0 / (r * np.log(r)) ** 2

        return density

    log_t = math.log(t_abs)

    def density(z):
        r = np.abs(np.asarray(z))
        return (math.pi / (r * log_t)) ** 2 / np.sin(math.pi * np.log(r) / log_t) ** 2

    return density


def cylinder_metric(chart: PlumbingChart, r_in: float, r_out: float) -> ChartMetric:
    """Hyperbolic cylinder density (pi/(|z0| log|t|))^2 sin^-2(pi log|z0|/log|t|).

    At t = 0 the density degenerates to the cusp model.  The domain must stay
    strictly inside (|t|, 1), where the sine factor is nonzero.
    """
    t_abs = abs(chart.t)
    if r_in <= t_abs or r_out >= 1.0:
        raise ChartError("cylinder domain must satisfy |t| < r_in < r_out < 1")
    return ChartMetric(r_in, r_out, _cylinder_density(t_abs), f"cylinder(t={chart.t!r})")


def grafted_metric(
    base: ChartMetric, chart: PlumbingChart, cut: CutoffProfile | None = None
) -> ChartMetric:
    """Geometric interpolation lambda_cyl^nu * lambda_base^(1-nu).

    nu is the node-centered weight of ``cut`` evaluated on |z0|^2 + |z1|^2,
    so the result is exactly the cylinder density near the node and exactly
    the base density away from it.
    """
    cut = cut or CutoffProfile()
    t_abs = abs(chart.t)
    r_in = max(base.r_in, t_abs)
    r_out = min(base.r_out, 1.0)
    if r_in >= r_out:
        raise ChartError("base and cylinder domains do not overlap")
    cyl = _cylinder_density(t_abs)

    def density(z):
        z = np.asarray(z)
        nu = cut.nu(z, chart.z1(z))
        return cyl(z) ** nu * base.density(z) ** (1.0 - nu)

    return ChartMetric(r_in, r_out, density, f"grafted(t={chart.t!r},profile={cut.name})")


_SECTION33_KINDS = ("sim_ind", "sim", "kappa")


def section33_densities(
    kind: str, chart: PlumbingChart, cut: CutoffProfile | None = None
) -> ChartMetric:
    """Squared norm of dz0/z0 - dz1/z1 in the three model metrics.

    kind 'sim_ind' is the norm induced by the ambient euclidean metric,
    'sim' its smoothed modification, 'kappa' the cylinder-grafted one.  The
    interpolation weight is nu_tilde (the node-centered profile at argument
    4(|z0|^2+|z1|^2)).
    """
    if kind not in _SECTION33_KINDS:
        raise ChartError(f"kind must be one of {_SECTION33_KINDS}")
    cut = cut or CutoffProfile()
    t_abs = abs(chart.t)
    if t_abs >= 0.25:
        raise ChartError("plumbing parameter must satisfy |t| < 1/4")
    r_in, r_out = t_abs, 1.0

    def usq(z):
        z = np.asarray(z)
        return np.abs(z) ** 2 + np.abs(chart.z1(z)) ** 2

    if kind == "sim_ind":
        def density(z):
            return 2.0 / usq(z)

    elif kind == "sim":
        def density(z):
            z = np.asarray(z)
            nt = cut.nu_tilde(z, chart.z1(z))
            return 2.0 / ((1.0 - nt) * usq(z) + nt)

    else:
        if t_abs == 0.0:
            def cyl_term(z):
                return 1.0 / np.log(np.abs(np.asarray(z))) ** 2

        else:
            log_t = math.log(t_abs)

            def cyl_term(z):
                r = np.abs(np.asarray(z))
                return (math.pi / log_t) ** 2 / np.sin(math.pi * np.log(r) / log_t) ** 2

        def density(z):
            z = np.asarray(z)
            nt = cut.nu_tilde(z, chart.z1(z))
            return 2.0 / ((1.0 - nt) * usq(z) + nt * cyl_term(z))

    return ChartMetric(r_in, r_out, density, f"{kind}(t={chart.t!r},profile={cut.name})")


def kappa_cusp_tangent_density(cut: CutoffProfile | None = None) -> ChartMetric:
    """Tangent density (1 - nu_tilde) + nu_tilde/(|z| log|z|)^2 of the t=0 kappa metric.

    Flat near the outer plateau, exactly the cusp model near the puncture.
    """
    cut = cut or CutoffProfile()

    def density(z):
        z = np.asarray(z)
        r = np.abs(z)
        nt = 1.0 - cut.nu0(4.0 * r**2)
        return (1.0 - nt) + nt / (r * np.log(r)) ** 2

    return ChartMetric(0.0, 1.0, density, f"kappa(0,profile={cut.name})")


def flatten(base: ChartMetric, cut: CutoffProfile | None = None) -> ChartMetric:
    """Remove the cusp singularity on the inner plateau, keep base outside.

    The density is multiplied by |z log|z||^(2(1-nu0(|z|))), which cancels
    the cusp-model singularity where nu0 = 0 and is trivial where nu0 = 1.
    """
    cut = cut or CutoffProfile()
    if base.r_in != 0.0:
        raise ChartError("flatten expects a punctured-disc (cusp) chart")
    probe = np.array([1e-3, 1e-4, 1e-5, 1e-6])
    prods = base.density(probe) * (probe * np.log(probe)) ** 2
    if not np.all(np.isfinite(prods)) or np.max(np.abs(prods)) > 1e3:
        raise ChartError("base is not cusp-type: lambda |z log z|^2 is unbounded")

    def density(z):
        z = np.asarray(z)
        r = np.abs(z)
        expo = 2.0 * (1.0 - cut.nu0(r))
        return base.density(z) * np.abs(r * np.log(r)) ** expo

    return ChartMetric(0.0, base.r_out, density, f"flattened({base.label},profile={cut.name})")


def _stencil_laplacian(func: Callable, z, rel_step: float = REL_STEP):
    """Flat five-point Laplacian of a scalar chart function, step ~ rel_step |z|."""
    z = np.asarray(z, dtype=complex)
    h = rel_step * np.abs(z)
    f0 = func(z)
    fs = func(z + h) + func(z - h) + func(z + 1j * h) + func(z - 1j * h)
    return (fs - 4.0 * f0) / h**2


def scalar_curvature(metric: ChartMetric, z, rel_step: float = REL_STEP):
    """Curvature -(1/(2 lambda)) Delta log lambda of the density lambda |dz|^2."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    h = rel_step * r
    if np.any(r - h <= metric.r_in) or np.any(r + h >= metric.r_out):
        raise ChartError("stencil leaves the chart domain")
    lap = _stencil_laplacian(lambda w: np.log(metric.density(w)), z, rel_step)
    return -lap / (2.0 * metric.density(z))


def c1_density(log_h: Callable, z, rel_step: float = REL_STEP):
    """First-Chern density (1/4 pi) Delta log h at z.

    ``log_h`` is the log of the squared norm of a fixed frame on the chart;
    the result is the coefficient against the area form dx dy in the
    convention pinned by the node-profile regression.
    """
    return _stencil_laplacian(log_h, z, rel_step) / (4.0 * math.pi)


DEFAULT_WOLPERT_RADII = tuple(10.0 ** (-2.0 - 0.5 * k) for k in range(9))


def _neville_at_zero(xs, ys):
    xs = list(map(float, xs))
    p = list(map(float, ys))
    n = len(p)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i])
    return p[0]


def wolpert_scaling(
    metric: ChartMetric,
    radii: tuple[float, ...] = DEFAULT_WOLPERT_RADII,
    n_angles: int = 8,
    cusp_tol: float = 1e-3,
) -> float:
    """log|a| of the rescaling z -> a z to the cusp-compatible coordinate.

    Extrapolates -(log|z|/2)(lambda |z|^2 log^2|z| - 1) to z = 0 by Neville
    interpolation in 1/log|z| over a geometric radius schedule.  The Wolpert
    norm of dz in this chart is exp(-log|a|).
    """
    if metric.r_in != 0.0:
        raise ChartError("wolpert scaling expects a punctured-disc (cusp) chart")
    radii = tuple(r for r in radii if r < metric.r_out / 2)
    if len(radii) < 3:
        raise ChartError("radius schedule too short inside the chart domain")
    angles = np.exp(2j * math.pi * np.arange(n_angles) / n_angles)
    xs, fs, prods = [], [], []
    for r in radii:
        lam = float(np.mean(metric.density(r * angles)))
        p = lam * r * r * math.log(r) ** 2
        xs.append(1.0 / math.log(r))
        prods.append(p)
        fs.append(-(math.log(r) / 2.0) * (p - 1.0))
    if abs(_neville_at_zero(xs, prods) - 1.0) > cusp_tol:
        raise ChartError(
            "metric is not cusp-type: lambda |z|^2 log^2|z| does not tend to 1"
        )
    return _neville_at_zero(xs, fs)


def wolpert_norm(metric: ChartMetric, **kwargs) -> float:
    """Wolpert norm of dz for a cusp-type density."""
    return math.exp(-wolpert_scaling(metric, **kwargs))


def density_grid_csv(metric: ChartMetric, path: str, n_r: int = 64, n_theta: int = 16) -> None:
    """Sample the density on a log-radial grid and write rows (r, theta, lambda)."""
    r_lo = metric.r_in if metric.r_in > 0 else metric.r_out * 1e-6
    rs = np.exp(np.linspace(math.log(r_lo * 1.01), math.log(metric.r_out * 0.99), n_r))
    thetas = 2.0 * math.pi * np.arange(n_theta) / n_theta
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "theta", "density"])
        for r in rs:
            lam = metric.density(r * np.exp(1j * thetas))
            for th, l in zip(thetas, np.atleast_1d(lam)):
                writer.writerow([f"{r:.17g}", f"{th:.17g}", f"{float(l):.17g}"])
