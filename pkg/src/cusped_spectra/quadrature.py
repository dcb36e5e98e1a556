"""Singular quadrature: regularized integrals, secondary forms, node identities.

Measure convention: an integrand written against dz dz-bar/(2 pi i) on a
positively oriented chart is integrated as -(1/pi) * (plain dx dy integral).
That translation lives in exactly one place (``dzdzbar_2pii_integral``) and
is pinned by the two radial canary integrals of ``node_profile_integrals``,
which must both evaluate to -2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _sci_integrate

from . import geometry
from .constants import TwistPower
from .geometry import ChartMetric, NodeMetricData

DZ_DZBAR_2PII_FACTOR = -1.0 / math.pi


class QuadratureError(RuntimeError):
    pass


class FitError(RuntimeError):
    pass


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _panel_quad(h: Callable, a: float, b: float, m_theta: int, order: int = 16) -> float:
    x, w = _gl(order)
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * x
    thetas = 2.0 * math.pi * np.arange(m_theta) / m_theta
    vals = h(nodes[:, None], thetas[None, :])
    g = np.mean(vals, axis=1) * 2.0 * math.pi
    return 0.5 * (b - a) * float(w @ g)


def _tensor_integrate(
    h: Callable,
    a: float,
    b: float,
    tol: float,
    m_theta: int = 32,
    max_theta: int = 2048,
    max_panels: int = 4096,
) -> float:
    """Adaptive panels in the radial parameter, doubled angular trapezoid.

    ``h(x, theta)`` must be vectorized over a (len(x), len(theta)) grid.
    The angular resolution is chosen once on the whole interval (periodic
    trapezoid converges fast for smooth integrands) and re-verified at the
    end; the radial direction is refined by panel bisection.
    """
    # angular resolution on a coarse whole-interval estimate
    m0 = m_theta
    coarse = _panel_quad(h, a, b, m_theta)
    converged_immediately = False
    while m_theta < max_theta:
        nxt = _panel_quad(h, a, b, 2 * m_theta)
        if abs(nxt - coarse) <= 0.05 * tol + 1e-15 * abs(nxt):
            converged_immediately = m_theta == m0
            coarse = nxt
            break
        coarse = nxt
        m_theta *= 2

    def refine(mt: int) -> float:
        stack = [(a, b, _panel_quad(h, a, b, mt))]
        total = 0.0
        panels = 0
        while stack:
            lo, hi, q = stack.pop()
            panels += 1
            if panels > max_panels:
                raise QuadratureError("quadrature did not converge within the panel budget")
            mid = 0.5 * (lo + hi)
            q1 = _panel_quad(h, lo, mid, mt)
            q2 = _panel_quad(h, mid, hi, mt)
            delta = q1 + q2 - q
            local_tol = tol * max((hi - lo) / (b - a), 1e-3)
            if abs(delta) <= local_tol or (hi - lo) < 1e-13 * (b - a):
                total += q1 + q2
                continue
            stack.append((lo, mid, q1))
            stack.append((mid, hi, q2))
        return total

    value = refine(m_theta)
    if not converged_immediately and m_theta < max_theta:
        # the angular grid was enlarged during the scan; re-verify it on the
        # radially refined partition
        check = refine(2 * m_theta)
        if abs(check - value) > 10.0 * tol:
            raise QuadratureError("angular refinement did not settle")
        value = check
    return value


def annulus_integrate(
    f: Callable, r_in: float, r_out: float, tol: float = 1e-9, **kwargs
) -> float:
    """Plain integral of f dx dy over {r_in < |z| < r_out}, log-radial substitution."""
    if not (0.0 < r_in < r_out):
        raise QuadratureError("need 0 < r_in < r_out")

    def h(u, theta):
        z = np.exp(u + 1j * theta)
        return np.real(f(z)) * np.exp(2.0 * u)

    return _tensor_integrate(h, math.log(r_in), math.log(r_out), tol, **kwargs)


def plane_integral(f: Callable, tol: float = 1e-8, **kwargs) -> float:
    """Plain integral of f dx dy over the plane, via r -> r/(1+r) compactification."""
    lo, hi = 1e-9, 1.0 - 1e-9

    def h(s, theta):
        r = s / (1.0 - s)
        z = r * np.exp(1j * theta)
        return np.real(f(z)) * r / (1.0 - s) ** 2

    return _tensor_integrate(h, lo, hi, tol, **kwargs)


def dzdzbar_2pii_integral(
    density: Callable, r_in: float, r_out: float, tol: float = 1e-9, **kwargs
) -> float:
    """Integral of density * dz dz-bar/(2 pi i) over an annulus.

    The single place where the measure translation -(1/pi) dx dy is applied.
    """
    return DZ_DZBAR_2PII_FACTOR * annulus_integrate(density, r_in, r_out, tol, **kwargs)


def chern_form_integral(
    f_density: Callable, r_in: float, r_out: float, tol: float = 1e-9, **kwargs
) -> float:
    """Integral of a degree-2 form whose density is in the c1_density convention."""
    return dzdzbar_2pii_integral(
        lambda z: math.pi * np.asarray(f_density(z)), r_in, r_out, tol, **kwargs
    )


def node_profile_integrals(tol: float = 1e-9) -> tuple[float, float]:
    """The two full-plane radial canaries pinning the measure convention.

    Both equal -2: the node curvature profile 4|y|^2/(|y|^4+1)^2 against
    dz dz-bar/(2 pi i), bare and weighted by log(|y|^2 + |y|^-2).
    """
    v1, _ = _sci_integrate.quad(lambda r: 8.0 * r**3 / (r**4 + 1.0) ** 2, 0.0, np.inf)
    v2a, _ = _sci_integrate.quad(
        lambda r: 8.0 * r**3 * math.log(r**2 + r**-2) / (r**4 + 1.0) ** 2, 0.0, 1.0
    )
    v2b, _ = _sci_integrate.quad(
        lambda r: 8.0 * r**3 * math.log(r**2 + r**-2) / (r**4 + 1.0) ** 2, 1.0, np.inf
    )
    return -v1, -(v2a + v2b)


@dataclass(frozen=True)
class RegIntegralSchedule:
    """Strictly decreasing cut radii plus the extrapolation order of the fit."""

    epsilons: tuple[float, ...]
    extrapolation_order: int = 1

    def __post_init__(self) -> None:
        eps = tuple(float(e) for e in self.epsilons)
        object.__setattr__(self, "epsilons", eps)
        if len(eps) < 3:
            raise ValueError("schedule needs at least 3 cut radii")
        if any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
            raise ValueError("cut radii must be positive and strictly decreasing")
        if self.extrapolation_order < 1:
            raise ValueError("extrapolation order must be positive")


@dataclass(frozen=True)
class RegularizedIntegralResult:
    finite_part: float
    cusp_coefficient: float
    per_epsilon: tuple[tuple[float, float], ...]
    error_estimate: float


def regularized_integral(
    f: Callable,
    cusps: Sequence[complex],
    schedule: RegIntegralSchedule,
    r_out: float,
    background: float = 0.0,
    fit_tol: float = 5e-3,
    quad_tol: float = 1e-6,
) -> RegularizedIntegralResult:
    """Finite part of an integral with cusp-type log-log divergences.

    The domain is the union of discs of radius ``r_out`` around the cusp
    points (assumed disjoint), plus an optional caller-supplied constant
    ``background`` for the exterior.  raw(eps) is fitted on the schedule tail
    as finite_part - 4 pi C (#cusps) log|log eps|; the shared coefficient C
    follows the single-constant convention, and a poor fit (cusps with
    visibly different leading coefficients, or a wrong expansion) raises.
    """
    if not cusps:
        raise ValueError("at least one cusp point is required")
    if max(schedule.epsilons) >= r_out:
        raise ValueError("largest cut radius must stay inside the cusp discs")
    pts = [complex(p) for p in cusps]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if abs(pts[i] - pts[j]) < 2.0 * r_out:
                raise ValueError("cusp discs must be disjoint")

    n_cusps = len(pts)
    # integrate once over (eps_0, r_out) and then only over the shells between
    # consecutive cut radii
    radii = (r_out,) + schedule.epsilons
    shell_sums = []
    for r_hi, r_lo in zip(radii, radii[1:]):
        s = 0.0
        for p in pts:
            s += annulus_integrate(lambda w, p=p: f(w + p), r_lo, r_hi, tol=quad_tol)
        shell_sums.append(s)
    raws = [float(background + x) for x in np.cumsum(shell_sums)]

    m = max(3, schedule.extrapolation_order)
    tail_eps = schedule.epsilons[-m:]
    tail_raw = raws[-m:]
    loglog = np.array([math.log(-math.log(e)) for e in tail_eps])
    design = np.stack([np.ones_like(loglog), -4.0 * math.pi * n_cusps * loglog], axis=1)
    coef, *_ = np.linalg.lstsq(design, np.array(tail_raw), rcond=None)
    finite_part, cusp_c = float(coef[0]), float(coef[1])
    resid = design @ coef - np.array(tail_raw)
    err = float(np.max(np.abs(resid)))
    if err > fit_tol * (1.0 + abs(finite_part)):
        raise FitError(
            f"log|log eps| fit residual {err:.3e} exceeds tolerance: "
            "cusp expansion hypothesis violated"
        )
    return RegularizedIntegralResult(
        finite_part=finite_part,
        cusp_coefficient=cusp_c,
        per_epsilon=tuple(zip(schedule.epsilons, raws)),
        error_estimate=err,
    )


@dataclass(frozen=True)
class BottChernPair:
    """Two log metric densities of the same line bundle in a common frame."""

    log_h1: Callable
    log_h2: Callable


def bott_chern_deg0(pair: BottChernPair, z):
    """Degree-0 secondary form log(h1/h2); its Todd variant is half of this."""
    return np.asarray(pair.log_h1(z)) - np.asarray(pair.log_h2(z))


def bott_chern_deg2(pair: BottChernPair, z, rel_step: float = geometry.REL_STEP):
    """Degree-2 secondary density log(h1/h2) (c1(h1)+c1(h2))/2; Todd variant /6."""
    ell = bott_chern_deg0(pair, z)
    c1 = geometry.c1_density(pair.log_h1, z, rel_step)
    c2 = geometry.c1_density(pair.log_h2, z, rel_step)
    return ell * (c1 + c2) / 2.0


def _as_twist(n) -> int:
    if isinstance(n, TwistPower):
        return n.n
    n = int(n)
    if n > 0:
        raise ValueError("twist power must be nonpositive")
    return n


def anomaly_rhs_chart(
    metric1: ChartMetric,
    metric2: ChartMetric,
    bundle1: Callable | None,
    bundle2: Callable | None,
    n,
    r_in: float,
    r_out: float,
    tol: float = 1e-7,
    schedule: RegIntegralSchedule | None = None,
) -> float:
    """Degree-2 anomaly integrand for a pair of chart metrics and bundle metrics.

    Assembles Td-tilde * ch * ch + Td * ch-tilde * ch + Td * ch * ch-tilde for
    line-bundle data, with Td = 1 + c1/2 and ch of the n-th twisted power
    1 + n c1 in degrees <= 2, and integrates it against the chart measure
    (regularized over the schedule when one is supplied).
    """
    n = _as_twist(n)
    if (bundle1 is None) != (bundle2 is None):
        raise ValueError("supply both bundle metrics or neither")

    log_l1 = metric1.log_density
    log_l2 = metric2.log_density

    def density(z):
        z = np.asarray(z, dtype=complex)
        ell = log_l1(z) - log_l2(z)
        c1 = geometry.c1_density(log_l1, z)
        c2 = geometry.c1_density(log_l2, z)
        out = ell * (c1 + c2) / 12.0 - (ell / 2.0) * n * c1
        out += n * n * ell * (c1 + c2) / 2.0 - n * ell * c2 / 2.0
        if bundle1 is not None:
            bxi = np.asarray(bundle1(z)) - np.asarray(bundle2(z))
            cxi1 = geometry.c1_density(bundle1, z)
            cxi2 = geometry.c1_density(bundle2, z)
            out += (ell / 2.0) * cxi1
            out += bxi * ((cxi1 + cxi2) / 2.0 + c2 / 2.0 - n * c1)
            out += -n * ell * cxi2
        return out

    if schedule is None:
        return chern_form_integral(density, r_in, r_out, tol)
    res = regularized_integral(
        lambda z: DZ_DZBAR_2PII_FACTOR * math.pi * np.asarray(density(z)),
        [0.0],
        schedule,
        r_out,
        quad_tol=tol,
    )
    return res.finite_part


def double_integral_identity(
    a: float, b: float, c: float, tol: float = 2e-5
) -> tuple[float, float]:
    """Full-plane log-ratio integral against the two node profiles.

    Returns (numeric, closed_form) with closed form 4 pi log(ac - b^2).
    """
    if not (a > 0 and c > 0):
        raise ValueError("a and c must be positive")
    disc = a * c - b * b
    if disc <= 0:
        raise ValueError("need ac - b^2 > 0")

    def f(z):
        x = np.real(z)
        rho2 = np.abs(z) ** 2
        P = a * rho2 + c - 2.0 * b * x
        Q = rho2 + 1.0
        return np.log(P / Q) * ((4.0 * a * c - 4.0 * b * b) / P**2 + 4.0 / Q**2)

    numeric = plane_integral(f, tol=tol)
    return numeric, 4.0 * math.pi * math.log(disc)


def _neville_at_zero(xs: Sequence[float], ys: Sequence[float]) -> float:
    xs = list(map(float, xs))
    p = list(map(float, ys))
    n = len(p)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i])
    return p[0]


def node_limit_check(
    data: NodeMetricData,
    t_schedule: Sequence[float],
    eps_schedule: Sequence[float],
    quad_tol: float = 1e-7,
    settle_tol: float = 5e-4,
) -> float:
    """Double limit of the node-localized anomaly integral, normalized.

    Evaluates the reduced two-dimensional integral over the annulus
    |t|^(1/4)/eps^(1/2) < x^2+y^2 < eps^(1/2)/|t|^(1/4), extrapolates t -> 0
    in the variable |t|^(1/4) for each eps, and returns the limit divided by
    1/6 so it compares directly against log(ac - |b|^2).
    """
    ts = tuple(float(t) for t in t_schedule)
    eps = tuple(float(e) for e in eps_schedule)
    if any(x <= 0 for x in ts) or any(a <= b for a, b in zip(ts, ts[1:])):
        raise ValueError("t schedule must be positive and strictly decreasing")
    if any(x <= 0 for x in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
        raise ValueError("eps schedule must be positive and strictly decreasing")
    a, c = data.a, data.c
    b = complex(data.b)
    disc = a * c - abs(b) ** 2

    def f(z):
        x = np.real(z)
        y = np.imag(z)
        rho2 = np.abs(z) ** 2
        P = a * rho2 + c - 2.0 * (b.real * x - b.imag * y)
        Q = rho2 + 1.0
        return np.log(P / Q) * ((4.0 * disc) / P**2 + 4.0 / Q**2)

    limits = []
    spreads = []
    for e in eps:
        ks = []
        for t in ts:
            rho2_lo = t**0.25 / math.sqrt(e)
            rho2_hi = math.sqrt(e) / t**0.25
            if rho2_lo >= rho2_hi:
                raise ValueError("schedules leave an empty annulus; decrease t or eps")
            val = annulus_integrate(f, math.sqrt(rho2_lo), math.sqrt(rho2_hi), tol=quad_tol)
            ks.append(val / (24.0 * math.pi))
        xs = [t**0.25 for t in ts]
        extrap = _neville_at_zero(xs, ks)
        limits.append(extrap)
        spreads.append(abs(_neville_at_zero(xs[:-1], ks[:-1]) - extrap))
    spread = max(spreads) + (max(limits) - min(limits))
    if spread > settle_tol:
        raise QuadratureError(f"node limit extrapolation not settled (spread {spread:.2e})")
    return 6.0 * float(np.mean(limits))


@dataclass(frozen=True)
class CylinderDecompositionReport:
    t: float
    lhs: float
    log_t_coefficient: float
    finite_coefficient: float
    recomposed: float

    @property
    def consistency(self) -> float:
        return abs(self.lhs - self.recomposed)

    @property
    def log_coeff_dist(self) -> float:
        return abs(self.log_t_coefficient + 2.0)

    @property
    def finite_coeff_dist(self) -> float:
        return abs(self.finite_coefficient + 2.0)


def cylinder_decomposition_check(t: float, tol: float = 1e-8) -> CylinderDecompositionReport:
    """Change-of-variables split of the node integral over 2|t| < |z| < 1/2.

    The left-hand side equals log|t| * I1(t) + I2(t) exactly; both I1 and I2
    tend to -2 as t -> 0.
    """
    if not (0.0 < t <= 1e-2):
        raise ValueError("t must lie in (0, 1e-2]")

    def profile(y):
        r2 = np.abs(y) ** 2
        return 4.0 * r2 / (r2**2 + 1.0) ** 2

    def lhs_density(z):
        r2 = np.abs(z) ** 2
        return np.log(r2 + t * t / r2) * 4.0 * r2 * t * t / (r2**2 + t * t) ** 2

    y_lo, y_hi = 2.0 * math.sqrt(t), 0.5 / math.sqrt(t)
    i1 = dzdzbar_2pii_integral(profile, y_lo, y_hi, tol=tol)
    i2 = dzdzbar_2pii_integral(
        lambda y: profile(y) * np.log(np.abs(y) ** 2 + np.abs(y) ** -2), y_lo, y_hi, tol=tol
    )
    lhs = dzdzbar_2pii_integral(lhs_density, 2.0 * t, 0.5, tol=tol)
    return CylinderDecompositionReport(
        t=t,
        lhs=lhs,
        log_t_coefficient=i1,
        finite_coefficient=i2,
        recomposed=math.log(t) * i1 + i2,
    )
