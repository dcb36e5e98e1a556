"""Universal constants entering the torsion and restriction identities.

Everything here is a closed-form expression in log 2, log pi, factorials and
zeta'(-1).  Values are computed in extended precision (fixed 40 digits via
mpmath) and returned as ordinary floats; the cancellations inside ``small_c``
involve terms of size ~k^2, so double precision alone would lose digits.
"""

from __future__ import annotations

import functools
import threading
from dataclasses import dataclass

import mpmath as mp

_DPS = 40
# mpmath's working precision is process-global; serialize the short
# extended-precision sections so the functions stay safe under threads.
# Reentrant: the constants call each other inside their locked sections.
_MP_LOCK = threading.RLock()


@dataclass(frozen=True)
class SurfaceSignature:
    """Genus / puncture-count pair (g, m)."""

    genus: int
    punctures: int

    def __post_init__(self) -> None:
        if self.genus < 0 or self.punctures < 0:
            raise ValueError("genus and puncture count must be nonnegative")
        if self.genus != int(self.genus) or self.punctures != int(self.punctures):
            raise ValueError("genus and puncture count must be integers")

    @property
    def euler_exponent(self) -> int:
        """2 - 2g - m, the exponent carried by the B factors."""
        return 2 - 2 * self.genus - self.punctures

    @property
    def is_stable(self) -> bool:
        """2g - 2 + m > 0."""
        return 2 * self.genus - 2 + self.punctures > 0


@dataclass(frozen=True)
class TwistPower:
    """Nonpositive power n of the twisted canonical bundle."""

    n: int

    def __post_init__(self) -> None:
        if self.n > 0:
            raise ValueError("twist power must be nonpositive")

    @property
    def k_index(self) -> int:
        return -self.n


def _hyperfactorial_log(n: int, terms: int = 8) -> mp.mpf:
    # Euler-Maclaurin constant extraction for sum_{k<=n} k log k.  The
    # correction series is + sum_j B_{2j} / ((2j)(2j-1)(2j-2) n^{2j-2});
    # with n ~ 100 and 8 terms the truncation error is far below 1e-30.
    s = mp.mpf(0)
    for k in range(1, n + 1):
        s += k * mp.log(k)
    nn = mp.mpf(n)
    s -= (nn**2 / 2 + nn / 2 + mp.mpf(1) / 12) * mp.log(nn)
    s += nn**2 / 4
    for j in range(2, 2 + terms):
        s += mp.bernoulli(2 * j) / ((2 * j) * (2 * j - 1) * (2 * j - 2) * nn ** (2 * j - 2))
    return s


@functools.lru_cache(maxsize=None)
def _log_glaisher() -> mp.mpf:
    with _MP_LOCK, mp.workdps(_DPS):
        return _hyperfactorial_log(120)


@functools.lru_cache(maxsize=None)
def _zeta_prime_minus_one() -> mp.mpf:
    with _MP_LOCK, mp.workdps(_DPS):
        return mp.mpf(1) / 12 - _log_glaisher()


def zeta_prime_minus_one() -> float:
    """zeta'(-1), via the Glaisher constant route 1/12 - log A."""
    return float(_zeta_prime_minus_one())


def log_glaisher() -> float:
    """log of the Glaisher constant A (accelerated Euler-Maclaurin)."""
    return float(_log_glaisher())


@functools.lru_cache(maxsize=None)
def big_C(k: int) -> float:
    """C_k = -6(1+k) log 2 - 6(1+2k) log pi - 6 log (2k)!   (C_0 = -6 log pi)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    with _MP_LOCK, mp.workdps(_DPS):
        if k == 0:
            return float(-6 * mp.log(mp.pi))
        val = (
            -6 * (1 + k) * mp.log(2)
            - 6 * (1 + 2 * k) * mp.log(mp.pi)
            - 6 * mp.loggamma(2 * k + 1)
        )
        return float(val)


@functools.lru_cache(maxsize=None)
def small_c(k: int) -> float:
    """The coefficient c_k; c_0 = 4 zeta'(-1) - 1/2 + log 2 pi."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    with _MP_LOCK, mp.workdps(_DPS):
        zp = mp.mpf(1) / 12 - _hyperfactorial_log(120)
        if k == 0:
            return float(4 * zp - mp.mpf(1) / 2 + mp.log(2 * mp.pi))
        s = mp.mpf(0)
        for l in range(k):
            s += (2 * k - 2 * l - 1) * (mp.log(2 * k + 2 * k * l - l * l - l) - mp.log(2))
        s += (mp.mpf(1) / 3 + k + k * k) * mp.log(2)
        s += (2 * k + 1) * mp.log(2 * mp.pi)
        s += 4 * zp
        s -= 2 * (k + mp.mpf(1) / 2) ** 2
        s -= 4 * sum(mp.loggamma(l + 1) for l in range(1, k))
        s -= 2 * mp.loggamma(k + 1)
        return float(s)


def log_B_factor(k: int, sig: SurfaceSignature) -> float:
    """log B_k(g, m) = (2 - 2g - m) c_k / 2.

    Exposed separately because B itself overflows/underflows float64 for
    large |2-2g-m| * |c_k|.
    """
    return sig.euler_exponent * small_c(k) / 2.0


def B_factor(k: int, sig: SurfaceSignature) -> float:
    """B_k(g, m) = exp((2 - 2g - m) c_k / 2)."""
    import math

    return math.exp(log_B_factor(k, sig))


def log_E_factor(sig: SurfaceSignature) -> float:
    """log E(g, m) = (g + 2 - m) log(2) / 3."""
    import math

    return (sig.genus + 2 - sig.punctures) * math.log(2.0) / 3.0


def E_factor(sig: SurfaceSignature) -> float:
    """E(g, m) = 2^((g + 2 - m)/3)."""
    import math

    return math.exp(log_E_factor(sig))


def E_const(k: int) -> float:
    """E_k = 4 zeta'(-1) - log 2 pi + (1 - C_k)/6."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    with _MP_LOCK, mp.workdps(_DPS):
        zp = mp.mpf(1) / 12 - _hyperfactorial_log(120)
        ck = mp.mpf(big_C(k))
        return float(4 * zp - mp.log(2 * mp.pi) + (1 - ck) / 6)


@functools.lru_cache(maxsize=None)
def bismut_const() -> float:
    """24 zeta'(-1) - 6 log 2 pi, the compact-degeneration constant."""
    with _MP_LOCK, mp.workdps(_DPS):
        zp = mp.mpf(1) / 12 - _hyperfactorial_log(120)
        return float(24 * zp - 6 * mp.log(2 * mp.pi))
