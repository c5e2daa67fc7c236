"""Multivariate I-Bessel series and the rank-1 K-Bessel integral."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from . import jordan, spherical
from .cone import (
    ConeParams,
    WallachKind,
    dim_km,
    enumerate_partitions,
    pochhammer,
    wallach_classify,
)
from .errors import (
    OutsideContinuousWallach,
    QuadratureNotConverged,
    TruncationNotConverged,
    WallachRankViolation,
)
from .jordan import JordanElement

RANK_TOL = 1e-8


@dataclass(frozen=True)
class SeriesTruncation:
    """Maximal weight of a partial sum and the accepted relative size of its last shell."""

    max_weight: int = 40
    tail_tol: float = 1e-10

    def __post_init__(self):
        if self.max_weight < 0:
            raise ValueError("max_weight must be >= 0")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    tail: float
    max_weight: int


def numerical_rank(lam, tol: float = RANK_TOL) -> int:
    lam = np.abs(np.asarray(lam))
    scale = max(1.0, float(lam.max(initial=0.0)))
    return int(np.sum(lam > tol * scale))


def series_partitions(cone: ConeParams, nu: float, max_weight: int, arg_rank: int):
    """Partitions entering a Bessel-type series at ``nu``.

    In the continuous range every partition contributes.  At a discrete point
    nu = k d/2 the argument must have rank <= k; partitions with m_{k+1} > 0
    are then dropped (their spherical polynomial vanishes on such arguments).
    """
    point = wallach_classify(cone, nu)
    parts = enumerate_partitions(cone.rank, max_weight)
    if point.kind is WallachKind.CONTINUOUS:
        return parts
    if point.kind is WallachKind.OUTSIDE:
        raise OutsideContinuousWallach(f"nu={nu} is outside the Wallach set")
    k = point.k
    if arg_rank > k:
        raise WallachRankViolation(f"nu={nu} = {k}d/2 needs an argument of rank <= {k}, got {arg_rank}")
    return [m for m in parts if k == cone.rank or m[k] == 0]


def bessel_coefficient(cone: ConeParams, nu: float, m) -> float:
    return dim_km(cone, m) / (pochhammer(cone, cone.n_over_r, m) * pochhammer(cone, nu, m))


def _shell_sum(cone, nu, parts, lam):
    phis = spherical.phi_from_spectral(cone, parts, lam)
    coef = np.array([bessel_coefficient(cone, nu, m) for m in parts])
    weights = np.array([sum(m) for m in parts])
    terms = coef.reshape((-1,) + (1,) * (phis.ndim - 1)) * phis
    kmax = int(weights.max(initial=0))
    shells = np.stack([terms[weights == k].sum(axis=0) for k in range(kmax + 1)])
    return shells


def ibessel_spectral(
    cone: ConeParams, nu: float, lam, trunc: SeriesTruncation, arg_rank: int | None = None
) -> SeriesValue:
    """I_nu at the element with spectral values ``lam`` (shape (r,))."""
    lam = np.asarray(lam, dtype=complex)
    if arg_rank is None:
        arg_rank = numerical_rank(lam)
    parts = series_partitions(cone, nu, trunc.max_weight, arg_rank)
    shells = _shell_sum(cone, nu, parts, lam)
    value = complex(shells.sum())
    tail = float(abs(shells[-1])) if trunc.max_weight > 0 else 0.0
    if tail > 0 and tail > trunc.tail_tol * max(abs(value), 1e-300):
        raise TruncationNotConverged(
            f"last shell {tail:.3e} exceeds {trunc.tail_tol:.1e} relative to |value|={abs(value):.3e}"
        )
    return SeriesValue(value, tail, trunc.max_weight)


def ibessel_series(
    cone: ConeParams, nu: float, z: JordanElement, trunc: SeriesTruncation | None = None
) -> SeriesValue:
    return ibessel_spectral(cone, nu, jordan.spectral_values(z), trunc or SeriesTruncation())


def ibessel(cone: ConeParams, nu: float, z: JordanElement, trunc: SeriesTruncation | None = None) -> complex:
    """Generalized I-Bessel function I_nu(z) = sum_m d_m Phi_m(z) / ((n/r)_m (nu)_m)."""
    return ibessel_series(cone, nu, z, trunc).value


def ibessel2(
    cone: ConeParams, nu: float, z: JordanElement, x: JordanElement, trunc: SeriesTruncation | None = None
) -> complex:
    """Two-argument I_nu(z, x) for x in the closed cone, via I_nu(P(x^(1/2)) z)."""
    arg = spherical.kernel_argument(z, x)
    # at discrete nu the rank condition is on x; P(x^(1/2)) z has no larger rank
    x_rank = numerical_rank(jordan.spectral_values(x))
    return ibessel_spectral(cone, nu, jordan.spectral_values(arg), trunc or SeriesTruncation(), x_rank).value


def ibessel_rank1(nu: float, z, terms: int = 200) -> np.ndarray:
    """Scalar series sum_k z^k / (k! (nu)_k), vectorized over ``z``.

    Summed until the terms are negligible; ``terms`` bounds the length.
    """
    z = np.asarray(z, dtype=complex)
    term = np.ones_like(z)
    acc = np.ones_like(z)
    for k in range(terms):
        term = term * z / ((k + 1) * (nu + k))
        acc = acc + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(acc)):
            break
    return acc


def ibessel_rank1_classical(nu: float, x: float) -> float:
    """Gamma(nu) x^((1-nu)/2) I_{nu-1}(2 sqrt x) for x > 0."""
    return math.gamma(nu) * x ** ((1 - nu) / 2) * special.iv(nu - 1, 2 * math.sqrt(x))


# -- K-Bessel, rank one --------------------------------------------------------

@dataclass(frozen=True)
class KBesselValue:
    value: float
    value_inverted: float
    abserr: float


def kbessel_rank1_forms(nu: float, x: float, epsrel: float = 1e-12) -> KBesselValue:
    """Both integral forms of the rank-1 K-Bessel function.

    int_0^inf exp(-1/u - x u) u^(nu-2) du and int_0^inf exp(-v - x/v) v^(-nu) dv.
    """
    if not x > 0:
        raise ValueError("kbessel_rank1 needs x > 0")

    # after u = exp(s) both integrands are smooth with double-exponential decay
    def direct(s):
        return math.exp(-math.exp(-s) - x * math.exp(s) + (nu - 1) * s)

    def inverted(s):
        return math.exp(-math.exp(s) - x * math.exp(-s) + (1 - nu) * s)

    center = -0.5 * math.log(x)
    a, ea = _quad_line(direct, center, epsrel)
    b, eb = _quad_line(inverted, -center, epsrel)
    err = max(ea, eb)
    if err > 1e-9 * abs(a):
        raise QuadratureNotConverged(f"K-Bessel quadrature error estimate {err:.2e}")
    return KBesselValue(a, b, err)


def _quad_line(f, center, epsrel, half_width: float = 12.0):
    # beyond |s - center| = 12 the integrand is below exp(-e^11)
    left, el = integrate.quad(f, center - half_width, center, epsrel=epsrel, epsabs=0, limit=200)
    right, er = integrate.quad(f, center, center + half_width, epsrel=epsrel, epsabs=0, limit=200)
    return left + right, el + er


def kbessel_rank1(nu: float, x: float) -> float:
    """Rank-1 K-Bessel function int_0^inf exp(-1/u - x u) u^(nu-2) du."""
    return kbessel_rank1_forms(nu, x).value


def kbessel_rank1_classical(nu: float, x: float) -> float:
    """2 x^((1-nu)/2) K_{nu-1}(2 sqrt x)."""
    return 2 * x ** ((1 - nu) / 2) * special.kv(nu - 1, 2 * math.sqrt(x))
