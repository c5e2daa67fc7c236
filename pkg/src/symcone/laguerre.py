"""Generalized binomial coefficients, Laguerre polynomials and Laguerre functions.

Binomial coefficients come from expanding Phi_m(e + x) exactly: shift the
monomial expansion of Phi_m, then peel off spherical polynomials in
decreasing lexicographic order (the Jack basis is triangular there).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import jordan, spherical
from .cone import (
    ConeParams,
    Partition,
    add_box,
    as_partition,
    dim_km,
    enumerate_partitions,
    in_continuous_wallach,
    partitions_of_weight,
    pochhammer,
    remove_box,
)
from .errors import DegenerateDenominator, OutsideContinuousWallach, WallachSingularity
from .jordan import JordanElement


@lru_cache(maxsize=None)
def _shift_row(mu: Partition) -> dict[Partition, int]:
    """Coefficients of m_lambda in m_mu(1 + x): sum over rearrangements a of prod C(a_i, lambda_i)."""
    out: dict[Partition, int] = {}
    r = len(mu)
    for a in spherical.orbit(mu):
        # enumerate sorted lambda <= a componentwise
        def rec(i, prev, acc, coef):
            if i == r:
                lam = tuple(acc)
                out[lam] = out.get(lam, 0) + coef
                return
            for v in range(min(a[i], prev), -1, -1):
                rec(i + 1, v, acc + [v], coef * math.comb(a[i], v))

        rec(0, max(mu) if mu else 0, [], 1)
    return out


@lru_cache(maxsize=None)
def _binomial_row(r: int, d: int, m: Partition) -> dict[Partition, Fraction]:
    cone_coeffs = spherical.get_cache().get(r, d, m).coeffs if r > 1 else {m: Fraction(1)}
    shifted: dict[Partition, Fraction] = {}
    for mu, c in cone_coeffs.items():
        for lam, t in _shift_row(mu).items():
            shifted[lam] = shifted.get(lam, 0) + c * t
    row: dict[Partition, Fraction] = {}
    for k in range(sum(m), -1, -1):
        for n in partitions_of_weight(k, r):
            s = shifted.get(n)
            if not s:
                continue
            jc = spherical.get_cache().get(r, d, n).coeffs if r > 1 else {n: Fraction(1)}
            b = s / jc[n]
            row[n] = b
            for mu, c in jc.items():
                shifted[mu] = shifted.get(mu, 0) - b * c
    return row


def binomial(cone: ConeParams, m, n) -> Fraction:
    """Generalized binomial coefficient (m choose n), exact."""
    m = as_partition(m, cone.rank)
    n = as_partition(n, cone.rank)
    spherical._check_weight(cone, sum(m))
    return _binomial_row(cone.rank, cone.peirce_d, m).get(n, Fraction(0))


def binomial_row(cone: ConeParams, m) -> dict[Partition, Fraction]:
    m = as_partition(m, cone.rank)
    spherical._check_weight(cone, sum(m))
    return _binomial_row(cone.rank, cone.peirce_d, m)


@lru_cache(maxsize=None)
def _float_row(r: int, d: int, m: Partition) -> tuple[tuple[Partition, ...], np.ndarray]:
    row = _binomial_row(r, d, m)
    return tuple(row), np.array([float(b) for b in row.values()])


@dataclass
class BinomialTable:
    """(m choose n) for all |n| <= |m| <= M, zero entries implicit."""

    cone: ConeParams
    max_weight: int
    table: dict[Partition, dict[Partition, Fraction]] = field(default_factory=dict)

    def __call__(self, m, n) -> Fraction:
        return self.table[as_partition(m, self.cone.rank)].get(as_partition(n, self.cone.rank), Fraction(0))


def binomial_table(cone: ConeParams, max_weight: int) -> BinomialTable:
    spherical._check_weight(cone, max_weight)
    tab = BinomialTable(cone, max_weight)
    for m in enumerate_partitions(cone.rank, max_weight):
        tab.table[m] = binomial_row(cone, m)
    return tab


def lower_binomial_closed_form(cone: ConeParams, m: Partition, j: int) -> float:
    """(m choose m - e_j) from the closed product (``j`` 0-based)."""
    h = cone.half_d
    r = cone.rank
    out = m[j] + (r - 1 - j) * h
    for i in range(r):
        if i != j:
            diff = m[j] - m[i]
            out *= (diff + (i - j - 1) * h) / (diff + (i - j) * h)
    return out


# -- Laguerre polynomials and functions ------------------------------------------

def _poch_vanishes(cone: ConeParams, nu: float, n: Partition) -> bool:
    for j, nj in enumerate(n):
        base = nu - j * cone.half_d
        for s in range(nj):
            if abs(base + s) < 1e-12:
                return True
    return False


def laguerre_poly_many(cone: ConeParams, nu: float, partitions, x: JordanElement) -> np.ndarray:
    """L_m^nu(x) for each m in ``partitions``."""
    parts = [as_partition(m, cone.rank) for m in partitions]
    if not parts:
        return np.zeros(0, dtype=complex)
    if cone.rank == 1:
        return _laguerre_poly_rank1(cone, nu, parts, complex(x.data[0, 0]))
    if not x.is_complex:
        return _laguerre_poly_real(cone, nu, parts, x)
    kmax = max(sum(m) for m in parts)
    lower = enumerate_partitions(cone.rank, kmax)
    index = {n: i for i, n in enumerate(lower)}
    # Phi_n(-x) / (nu)_n, with vanishing Pochhammer symbols marked by nan
    scaled = spherical.phi_eval_many(cone, lower, -x)
    poch = np.array([pochhammer(cone, nu, n) for n in lower])
    for i, n in enumerate(lower):
        scaled[i] = np.nan if _poch_vanishes(cone, nu, n) else scaled[i] / poch[i]
    out = np.empty(len(parts), dtype=complex)
    for idx, m in enumerate(parts):
        spherical._check_weight(cone, sum(m))
        ns, bs = _float_row(cone.rank, cone.peirce_d, m)
        terms = scaled[[index[n] for n in ns]]
        if np.isnan(terms).any():
            bad = ns[int(np.flatnonzero(np.isnan(terms))[0])]
            raise WallachSingularity(f"(nu)_n = 0 for n={bad} at nu={nu}; L_m^nu undefined for m={m}")
        out[idx] = poch[index[m]] * (bs @ terms)
    return out


@lru_cache(maxsize=None)
def _ld_row(r: int, d: int, m: Partition) -> tuple[tuple[Partition, ...], np.ndarray]:
    row = _binomial_row(r, d, m)
    return tuple(row), np.array([spherical.fraction_to_longdouble(b) for b in row.values()])


def _laguerre_poly_real(cone: ConeParams, nu: float, parts, x: JordanElement) -> np.ndarray:
    """Binomial sum at a real argument, in extended precision.

    The terms alternate in sign with the weight of n and can exceed the sum
    by several orders of magnitude; carrying the extra bits of long double
    through every term keeps the cancellation below float64 resolution for
    moderate weights.
    """
    kmax = max(sum(m) for m in parts)
    lower = enumerate_partitions(cone.rank, kmax)
    index = {n: i for i, n in enumerate(lower)}
    lam = -jordan.spectral_values(x).real
    phis = spherical.phi_from_spectral_real_ld(cone, lower, lam)
    nu_ld = np.longdouble(nu)
    poch = np.empty(len(lower), dtype=np.longdouble)
    for i, n in enumerate(lower):
        acc = np.longdouble(1)
        for j, nj in enumerate(n):
            base = nu_ld - np.longdouble(j * cone.half_d)
            for s in range(nj):
                acc *= base + s
        poch[i] = acc
    vanishes = np.array([_poch_vanishes(cone, nu, n) for n in lower])
    out = np.empty(len(parts), dtype=complex)
    for idx, m in enumerate(parts):
        spherical._check_weight(cone, sum(m))
        ns, bs = _ld_row(cone.rank, cone.peirce_d, m)
        ids = [index[n] for n in ns]
        if vanishes[ids].any():
            bad = ns[int(np.flatnonzero(vanishes[ids])[0])]
            raise WallachSingularity(f"(nu)_n = 0 for n={bad} at nu={nu}; L_m^nu undefined for m={m}")
        out[idx] = float(poch[index[m]] * np.sum(bs * phis[ids] / poch[ids]))
    return out


def _laguerre_poly_rank1(cone: ConeParams, nu: float, parts, x: complex) -> np.ndarray:
    """Rank-1 binomial sum in extended precision.

    The alternating terms outgrow the result by many orders of magnitude for
    large degree, so the float sum loses most digits; the inputs are exact
    binary floats, so summing with extra digits recovers full accuracy.
    """
    import mpmath

    kmax = max(m[0] for m in parts)
    for m in parts:
        spherical._check_weight(cone, m[0])
    with mpmath.workdps(60):
        z = -mpmath.mpc(x.real, x.imag)
        poch = [mpmath.mpf(1)]
        for k in range(kmax):
            poch.append(poch[-1] * (mpmath.mpf(nu) + k))
        scaled = [None if _poch_vanishes(cone, nu, (n,)) else z**n / poch[n] for n in range(kmax + 1)]
        out = np.empty(len(parts), dtype=complex)
        for idx, m in enumerate(parts):
            row = binomial_row(cone, m)
            acc = mpmath.mpc(0)
            for (n,), b in row.items():
                if b == 0:
                    continue
                if scaled[n] is None:
                    raise WallachSingularity(f"(nu)_n = 0 for n={(n,)} at nu={nu}; L_m^nu undefined for m={m}")
                acc += mpmath.mpf(b.numerator) / b.denominator * scaled[n]
            out[idx] = complex(poch[m[0]] * acc)
    return out


def laguerre_poly_spectral(cone: ConeParams, nu: float, m, lam) -> np.ndarray:
    """L_m^nu at elements given by spectral values ``lam`` of shape (..., r)."""
    m = as_partition(m, cone.rank)
    spherical._check_weight(cone, sum(m))
    ns, bs = _float_row(cone.rank, cone.peirce_d, m)
    for n in ns:
        if _poch_vanishes(cone, nu, n):
            raise WallachSingularity(f"(nu)_n = 0 for n={n} at nu={nu}; L_m^nu undefined for m={m}")
    phis = spherical.phi_from_spectral(cone, ns, -np.asarray(lam, dtype=complex))
    inv = np.array([b / pochhammer(cone, nu, n) for n, b in zip(ns, bs)])
    return pochhammer(cone, nu, m) * np.tensordot(inv, phis, axes=(0, 0))


def laguerre_poly(cone: ConeParams, nu: float, m, x: JordanElement) -> complex:
    """Generalized Laguerre polynomial L_m^nu(x)."""
    return complex(laguerre_poly_many(cone, nu, [m], x)[0])


def laguerre_fn_many(cone: ConeParams, nu: float, partitions, x: JordanElement) -> np.ndarray:
    vals = laguerre_poly_many(cone, nu, partitions, x * 2.0)
    return np.exp(-jordan.jtrace(x)) * vals


def laguerre_fn(cone: ConeParams, nu: float, m, x: JordanElement) -> float:
    """Laguerre function l_m^nu(x) = exp(-tr x) L_m^nu(2x)."""
    val = complex(laguerre_fn_many(cone, nu, [m], x)[0])
    return val.real if not x.is_complex else val


def laguerre_norm_sq(cone: ConeParams, nu: float, m) -> float:
    """Squared L^2_nu norm (n/r)_m (nu)_m / d_m of l_m^nu."""
    if not in_continuous_wallach(cone, nu):
        raise OutsideContinuousWallach(f"nu={nu} is not in the continuous Wallach range")
    m = as_partition(m, cone.rank)
    return pochhammer(cone, cone.n_over_r, m) * pochhammer(cone, nu, m) / dim_km(cone, m)


def laguerre_fn_rank1(nu: float, max_degree: int, x) -> np.ndarray:
    """l_0^nu(x) .. l_M^nu(x) at rank 1 by the three-term recurrence.

    Summing the binomial expansion loses all accuracy for large degrees
    (the terms grow like exp(2 sqrt(2 m x))); the forward recurrence does not.
    Returns an array of shape (M + 1,) + shape(x).
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((max_degree + 1,) + x.shape)
    out[0] = np.exp(-x)
    if max_degree == 0:
        return out
    # tr(x) l_m = (m + nu/2) l_m - l_{m+1}/2 - m (nu + m - 1) l_{m-1}/2
    out[1] = 2 * (nu / 2 - x) * out[0]
    for m in range(1, max_degree):
        a = m + nu / 2
        c = -0.5 * m * (nu + m - 1)
        out[m + 1] = 2 * ((a - x) * out[m] + c * out[m - 1])
    return out


def laguerre_fn_rank1_normalized(nu: float, max_degree: int, x) -> np.ndarray:
    """l_m^nu(x) / sqrt(m! (nu)_m) for m = 0..M at rank 1.

    Same recurrence as :func:`laguerre_fn_rank1`, rescaled so that large
    degrees do not overflow.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((max_degree + 1,) + x.shape)
    out[0] = np.exp(-x)
    if max_degree == 0:
        return out
    out[1] = 2 * (nu / 2 - x) * out[0] / math.sqrt(nu)
    for m in range(1, max_degree):
        a = m + nu / 2
        out[m + 1] = 2 * ((a - x) * out[m] - 0.5 * math.sqrt(m * (nu + m - 1)) * out[m - 1]) / math.sqrt(
            (m + 1) * (nu + m)
        )
    return out


# -- recurrence ------------------------------------------------------------------

@dataclass(frozen=True)
class RecurrenceCoeffs:
    a: float
    b: np.ndarray
    c: np.ndarray


def recurrence_coeffs(cone: ConeParams, nu: float, m) -> RecurrenceCoeffs:
    """Coefficients of tr(x) l_m = a l_m + sum_j (b_j l_{m+e_j} + c_j l_{m-e_j})."""
    m = as_partition(m, cone.rank)
    r, h = cone.rank, cone.half_d
    b = np.empty(r)
    c = np.empty(r)
    for j in range(r):
        bj = -0.5
        cj = -0.5 * (nu + m[j] - j * h - 1) * (m[j] + (r - 1 - j) * h)
        for i in range(r):
            if i == j:
                continue
            diff = m[j] - m[i]
            den = diff + (i - j) * h
            if den == 0:
                raise DegenerateDenominator(f"zero denominator for m={m}, i={i + 1}, j={j + 1}")
            bj *= (diff + (i - j + 1) * h) / den
            cj *= (diff + (i - j - 1) * h) / den
        b[j], c[j] = bj, cj
    return RecurrenceCoeffs(sum(m) + r * nu / 2, b, c)


def neighbours(m: Partition):
    """(j, m + e_j or None, m - e_j or None) for each j."""
    return [(j, add_box(m, j), remove_box(m, j)) for j in range(len(m))]


def recurrence_rhs(cone: ConeParams, nu: float, m: Partition, values: dict) -> complex:
    """a l_m + sum_j (b_j l_{m+e_j} + c_j l_{m-e_j}) from precomputed ``values``."""
    co = recurrence_coeffs(cone, nu, m)
    acc = co.a * values[m]
    for j, up, down in neighbours(m):
        if up is not None:
            acc += co.b[j] * values[up]
        if down is not None:
            acc += co.c[j] * values[down]
    return acc


def recurrence_residual(cone: ConeParams, nu: float, m, x: JordanElement) -> float:
    m = as_partition(m, cone.rank)
    parts = [m] + [p for _, up, down in neighbours(m) for p in (up, down) if p is not None]
    vals = dict(zip(parts, laguerre_fn_many(cone, nu, parts, x)))
    lhs = jordan.jtrace(x) * vals[m]
    return float(abs(lhs - recurrence_rhs(cone, nu, m, vals)))
