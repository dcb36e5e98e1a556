"""Torsion assembly from the universal constants and Selberg zeta inputs."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from . import constants
from .constants import SurfaceSignature, TwistPower

ZPRIME_KIND = "zprime_at_1"
ZVALUE_KIND = "z_value"


class TorsionError(ValueError):
    pass


@dataclass(frozen=True)
class TorsionRequest:
    """Surface signature, twist power and the matching zeta input.

    For twist 0 the input is an estimate of Z'(1); for negative twist n it is
    the value Z(-n + 1) of the truncated product.
    """

    sig: SurfaceSignature
    twist: TwistPower
    zeta_input: float
    zeta_kind: str

    def __post_init__(self) -> None:
        if self.zeta_kind not in (ZPRIME_KIND, ZVALUE_KIND):
            raise TorsionError(f"unknown zeta input kind {self.zeta_kind!r}")
        expected = ZPRIME_KIND if self.twist.n == 0 else ZVALUE_KIND
        if self.zeta_kind != expected:
            raise TorsionError(
                f"zeta input kind {self.zeta_kind!r} does not match twist n={self.twist.n}"
            )

    @classmethod
    def for_zprime(cls, sig: SurfaceSignature, zprime_at_1: float) -> "TorsionRequest":
        return cls(sig, TwistPower(0), zprime_at_1, ZPRIME_KIND)

    @classmethod
    def for_z_value(cls, sig: SurfaceSignature, n: int, z_value: float) -> "TorsionRequest":
        return cls(sig, TwistPower(n), z_value, ZVALUE_KIND)


def _validated(req: TorsionRequest) -> None:
    if not req.sig.is_stable:
        warnings.warn(
            f"signature (g={req.sig.genus}, m={req.sig.punctures}) is not stable "
            "(2g - 2 + m <= 0); the formula still evaluates",
            stacklevel=3,
        )
    if req.twist.n < 0:
        if req.zeta_input <= 0.0:
            raise TorsionError(
                "Z(-n+1) must be positive; a nonpositive value signals upstream "
                "truncation failure"
            )
        if req.zeta_input > 1.0:
            warnings.warn(
                "Z(-n+1) exceeds 1; truncated products lie in (0, 1]", stacklevel=3
            )


def log_tz_torsion(req: TorsionRequest) -> float:
    """log of the torsion value; requires a positive zeta input."""
    _validated(req)
    if req.zeta_input <= 0.0:
        raise TorsionError("log form requires a positive zeta input")
    k = req.twist.k_index
    log_b = constants.log_B_factor(k, req.sig)
    if req.twist.n == 0:
        return constants.log_E_factor(req.sig) + log_b + math.log(req.zeta_input)
    return log_b + math.log(req.zeta_input)


def tz_torsion(req: TorsionRequest) -> float:
    """E(g,m) B_0(g,m) Z'(1) for twist 0, B_{-n}(g,m) Z(-n+1) for twist n < 0."""
    _validated(req)
    k = req.twist.k_index
    if req.twist.n == 0:
        return constants.E_factor(req.sig) * constants.B_factor(k, req.sig) * req.zeta_input
    return constants.B_factor(k, req.sig) * req.zeta_input


def log_quillen(torsion: float, log_l2_norm: float) -> float:
    """(1/2) log torsion + externally supplied log L2 contribution."""
    if torsion <= 0.0:
        raise TorsionError("torsion must be positive")
    return 0.5 * math.log(torsion) + log_l2_norm


@dataclass(frozen=True)
class RestrictionConstantReport:
    n: int
    c_constant: float
    e_constant: float
    bismut_constant: float
    residual: float
    passed: bool


def restriction_constant_check(n: int, tol: float = 1e-12) -> RestrictionConstantReport:
    """Internal consistency of the constant family at twist n <= 0.

    Checks E_{-n} - (4 zeta'(-1) - log 2 pi) - 1/6 = -C_{-n}/6 and emits the
    constant triple used by the restriction and perturbation identities.
    """
    if n > 0:
        raise TorsionError("twist power must be nonpositive")
    k = -n
    c_k = constants.big_C(k)
    e_k = constants.E_const(k)
    base = 4.0 * constants.zeta_prime_minus_one() - math.log(2.0 * math.pi)
    residual = abs((e_k - base - 1.0 / 6.0) - (-c_k / 6.0))
    return RestrictionConstantReport(
        n=n,
        c_constant=c_k,
        e_constant=e_k,
        bismut_constant=constants.bismut_const(),
        residual=residual,
        passed=residual <= tol,
    )
