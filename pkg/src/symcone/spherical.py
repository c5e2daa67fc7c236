"""Spherical polynomials as normalized Jack polynomials with parameter 2/d.

Jack coefficients in the monomial basis are generated exactly (rational
arithmetic) as eigenvectors of the Laplace-Beltrami type operator

    D = (alpha/2) sum_i x_i^2 d_i^2 + sum_{i<j} (x_i^2 d_i - x_j^2 d_j) / (x_i - x_j),

which is triangular in dominance order on monomial symmetric functions.
Evaluation goes through the spectral values of the argument (see
:func:`symcone.jordan.payload_spectral_values`).
"""
from __future__ import annotations

import contextlib
import itertools
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import jordan
from .cone import ConeParams, Partition, as_partition, dominates, partitions_of_weight
from .errors import NotInClosedCone, UnsupportedBackend, WeightLimitExceeded
from .jordan import JordanElement

DEFAULT_WEIGHT_LIMIT = 40
_weight_limit = DEFAULT_WEIGHT_LIMIT


def weight_limit() -> int:
    return _weight_limit


def set_weight_limit(limit: int) -> None:
    global _weight_limit
    _weight_limit = int(limit)


@contextlib.contextmanager
def raised_weight_limit(limit: int):
    """Temporarily allow partitions up to ``limit`` (never lowers the limit)."""
    old = _weight_limit
    set_weight_limit(max(old, limit))
    try:
        yield
    finally:
        set_weight_limit(old)


def _check_weight(cone: ConeParams, k: int):
    # rank one needs no table: Phi_(m) = x^m
    if cone.rank > 1 and k > _weight_limit:
        raise WeightLimitExceeded(f"weight {k} exceeds the configured limit {_weight_limit}")


@lru_cache(maxsize=None)
def orbit(mu: Partition) -> tuple[tuple[int, ...], ...]:
    """Distinct rearrangements of ``mu`` (the exponents of the monomial m_mu)."""
    return tuple(sorted(set(itertools.permutations(mu)), reverse=True))


# -- the operator D on monomial symmetric functions ------------------------------------

@lru_cache(maxsize=None)
def _pair_part(mu: Partition) -> dict[Partition, int]:
    """Coefficients of m_lambda in sum_{i<j} (x_i^2 d_i - x_j^2 d_j)/(x_i - x_j) m_mu."""
    r = len(mu)
    acc: dict[tuple[int, ...], int] = {}

    def bump(a, i, j, ei, ej, c):
        b = list(a)
        b[i], b[j] = ei, ej
        b = tuple(b)
        # only sorted exponents are needed to read off monomial coefficients
        if all(b[t] >= b[t + 1] for t in range(r - 1)):
            acc[b] = acc.get(b, 0) + c

    for a in orbit(mu):
        for i in range(r):
            for j in range(i + 1, r):
                p, q = a[i], a[j]
                if p == q:
                    bump(a, i, j, p, p, p)
                elif p > q:
                    # a and its (i,j)-swap together give
                    # (x_i x_j)^q [p h_k(x_i, x_j) - q x_i x_j h_{k-2}(x_i, x_j)], k = p - q
                    k = p - q
                    for s in range(k + 1):
                        bump(a, i, j, q + s, q + k - s, p)
                    for s in range(k - 1):
                        bump(a, i, j, q + 1 + s, q + k - 1 - s, -q)
    return {lam: c for lam, c in acc.items() if c}


def _diag_part(mu: Partition, alpha: Fraction) -> Fraction:
    return alpha / 2 * sum(p * (p - 1) for p in mu)


def operator_matrix(r: int, alpha: Fraction, k: int) -> dict[tuple[Partition, Partition], Fraction]:
    """Sparse matrix {(lambda, mu): D_{lambda mu}} on weight-k monomials in r variables."""
    out = {}
    for mu in partitions_of_weight(k, r):
        mu = as_partition(mu, r)
        col = dict(_pair_part(mu))
        col[mu] = col.get(mu, 0) + _diag_part(mu, alpha)
        for lam, c in col.items():
            out[(lam, mu)] = Fraction(c)
    return out


# -- Jack coefficients -----------------------------------------------------------

@dataclass(frozen=True)
class SymPolyCoeffs:
    """Monomial-basis coefficients of Phi_m, normalized to 1 at (1, ..., 1).

    ``norm`` is the factor by which the monic Jack polynomial (coefficient 1
    on m_m) was divided.
    """

    partition: Partition
    coeffs: dict[Partition, Fraction]
    norm: Fraction

    def leading(self) -> Fraction:
        return self.coeffs[self.partition]


class JackCache:
    """Coefficient tables keyed by (r, d, m), optionally backed by ``jackcache.tsv``.

    Reads are lock-free dictionary lookups; computing and persisting a
    missing weight shell happens under a single lock.
    """

    FILENAME = "jackcache.tsv"
    HEADER = "r\td_num\td_den\tm\tmu\tcoeff_num\tcoeff_den\n"

    def __init__(self, directory: str | os.PathLike | None = None):
        self._tables: dict[tuple[int, Fraction], dict[Partition, SymPolyCoeffs]] = {}
        self._shells: set[tuple[int, Fraction, int]] = set()
        self._lock = threading.Lock()
        self.directory = Path(directory) if directory else None
        if self.directory is not None:
            self._load()

    @property
    def path(self) -> Path | None:
        return self.directory / self.FILENAME if self.directory else None

    def get(self, r: int, d: int, m: Partition) -> SymPolyCoeffs:
        key = (r, Fraction(d))
        table = self._tables.get(key)
        if table is not None and m in table:
            return table[m]
        with self._lock:
            table = self._tables.setdefault(key, {})
            if m not in table:
                shell = self._compute_shell(r, Fraction(d), sum(m))
                table.update(shell)
                if self.path is not None:
                    self._append(r, Fraction(d), shell.values())
            return table[m]

    def _compute_shell(self, r: int, d: Fraction, k: int) -> dict[Partition, SymPolyCoeffs]:
        alpha = 2 / d
        parts = [as_partition(p, r) for p in partitions_of_weight(k, r)]
        dmat = operator_matrix(r, alpha, k)
        shell = {}
        for idx, kappa in enumerate(parts):
            eig = dmat[(kappa, kappa)]
            coeffs = {kappa: Fraction(1)}
            for mu in parts[idx + 1:]:
                if not dominates(kappa, mu):
                    continue
                rhs = Fraction(0)
                for nu, c in coeffs.items():
                    entry = dmat.get((mu, nu))
                    if entry:
                        rhs += entry * c
                gap = eig - dmat[(mu, mu)]
                if gap == 0:
                    raise ArithmeticError(f"degenerate eigenvalue for {kappa} vs {mu}")
                if rhs:
                    coeffs[mu] = rhs / gap
            norm = sum(c * len(orbit(mu)) for mu, c in coeffs.items())
            coeffs = {mu: c / norm for mu, c in coeffs.items()}
            shell[kappa] = SymPolyCoeffs(kappa, coeffs, norm)
        self._shells.add((r, d, k))
        return shell

    def _append(self, r: int, d: Fraction, entries):
        self.directory.mkdir(parents=True, exist_ok=True)
        new = not self.path.exists()
        with open(self.path, "a", encoding="utf-8") as fh:
            if new:
                fh.write(self.HEADER)
            for ent in entries:
                m = ",".join(map(str, ent.partition))
                for mu, c in ent.coeffs.items():
                    fh.write(
                        f"{r}\t{d.numerator}\t{d.denominator}\t{m}\t{','.join(map(str, mu))}"
                        f"\t{c.numerator}\t{c.denominator}\n"
                    )

    def _load(self):
        if self.path is None or not self.path.exists():
            return
        grouped: dict[tuple[int, Fraction, Partition], dict[Partition, Fraction]] = {}
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip() or line.startswith("r\t"):
                    continue
                r, dn, dd, m, mu, cn, cd = line.rstrip("\n").split("\t")
                key = (int(r), Fraction(int(dn), int(dd)), tuple(int(v) for v in m.split(",")))
                grouped.setdefault(key, {})[tuple(int(v) for v in mu.split(","))] = Fraction(int(cn), int(cd))
        for (r, d, m), coeffs in grouped.items():
            norm = 1 / coeffs[m]
            self._tables.setdefault((r, d), {})[m] = SymPolyCoeffs(m, coeffs, norm)

    def entries(self):
        for (r, d), table in sorted(self._tables.items()):
            for m in sorted(table, key=lambda p: (sum(p), tuple(-x for x in p))):
                yield r, d, table[m]

    def clear(self):
        with self._lock:
            self._tables.clear()
            self._shells.clear()
            _compiled.cache_clear()
            _compiled_ld.cache_clear()
            if self.path is not None and self.path.exists():
                self.path.unlink()


_cache = JackCache()


def get_cache() -> JackCache:
    return _cache


def configure_cache(directory: str | os.PathLike | None) -> JackCache:
    """Switch the process-wide coefficient cache (``None`` = memory only)."""
    global _cache
    _cache = JackCache(directory)
    _compiled.cache_clear()
    _compiled_ld.cache_clear()
    return _cache


def jack_coeffs(cone: ConeParams, m) -> SymPolyCoeffs:
    m = as_partition(m, cone.rank)
    _check_weight(cone, sum(m))
    if cone.rank == 1:
        return SymPolyCoeffs(m, {m: Fraction(1)}, Fraction(1))
    return _cache.get(cone.rank, cone.peirce_d, m)


# -- evaluation ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _compiled(r: int, d: int, m: Partition) -> tuple[np.ndarray, np.ndarray]:
    """All monomials x^a of Phi_m with float coefficients: (exponents (T, r), coefs (T,))."""
    if r == 1:
        return np.array([[m[0]]]), np.array([1.0])
    coeffs = _cache.get(r, d, m).coeffs
    exps, cs = [], []
    for mu, c in coeffs.items():
        fc = float(c)
        for a in orbit(mu):
            exps.append(a)
            cs.append(fc)
    return np.array(exps, dtype=int), np.array(cs)


def _power_table(lam: np.ndarray, kmax: int) -> np.ndarray:
    """lam[..., i] ** e for e = 0..kmax, on a new last axis."""
    out = np.empty(lam.shape + (kmax + 1,), dtype=complex)
    out[..., 0] = 1.0
    for e in range(1, kmax + 1):
        out[..., e] = out[..., e - 1] * lam
    return out


def phi_from_spectral(cone: ConeParams, partitions, lam) -> np.ndarray:
    """Phi_m evaluated at spectral values ``lam`` (..., r) for each m in ``partitions``.

    Returns an array of shape (len(partitions), ...).
    """
    lam = np.asarray(lam, dtype=complex)
    parts = [as_partition(m, cone.rank) for m in partitions]
    if not parts:
        return np.zeros((0,) + lam.shape[:-1], dtype=complex)
    kmax = max(max(m) for m in parts)
    for m in parts:
        _check_weight(cone, sum(m))
    table = _power_table(lam, kmax)
    out = np.empty((len(parts),) + lam.shape[:-1], dtype=complex)
    r = cone.rank
    for idx, m in enumerate(parts):
        exps, cs = _compiled(r, cone.peirce_d, m)
        prod = np.ones(lam.shape[:-1] + (len(cs),), dtype=complex)
        for i in range(r):
            prod = prod * table[..., i, exps[:, i]]
        out[idx] = prod @ cs
    return out


def fraction_to_longdouble(c: Fraction) -> np.longdouble:
    """Round a fraction to extended precision via a two-term float split."""
    hi = float(c)
    lo = float(c - Fraction(hi))
    return np.longdouble(hi) + np.longdouble(lo)


@lru_cache(maxsize=None)
def _compiled_ld(r: int, d: int, m: Partition) -> tuple[np.ndarray, np.ndarray]:
    exps, _ = _compiled(r, d, m)
    if r == 1:
        return exps, np.array([1], dtype=np.longdouble)
    coeffs = _cache.get(r, d, m).coeffs
    cs = [fraction_to_longdouble(c) for mu, c in coeffs.items() for _ in orbit(mu)]
    return exps, np.array(cs, dtype=np.longdouble)


def phi_from_spectral_real_ld(cone: ConeParams, partitions, lam) -> np.ndarray:
    """Phi_m at real spectral values ``lam`` (r,), evaluated in extended precision."""
    lam = np.asarray(lam, dtype=np.longdouble)
    parts = [as_partition(m, cone.rank) for m in partitions]
    kmax = max((max(m) for m in parts), default=0)
    table = np.ones((cone.rank, kmax + 1), dtype=np.longdouble)
    for e in range(1, kmax + 1):
        table[:, e] = table[:, e - 1] * lam
    out = np.empty(len(parts), dtype=np.longdouble)
    for idx, m in enumerate(parts):
        _check_weight(cone, sum(m))
        exps, cs = _compiled_ld(cone.rank, cone.peirce_d, m)
        prod = np.ones(len(cs), dtype=np.longdouble)
        for i in range(cone.rank):
            prod = prod * table[i, exps[:, i]]
        out[idx] = np.sum(prod * cs)
    return out


def phi_eval(cone: ConeParams, m, x: JordanElement) -> complex:
    """Phi_m(x) for x in V or V_C, with Phi_m(e) = 1."""
    lam = jordan.spectral_values(x)
    return complex(phi_from_spectral(cone, [m], lam)[0])


def phi_eval_many(cone: ConeParams, partitions, x: JordanElement) -> np.ndarray:
    lam = jordan.spectral_values(x)
    return phi_from_spectral(cone, partitions, lam)


def kernel_argument(z: JordanElement, x: JordanElement) -> JordanElement:
    """P(x^(1/2)) z for x in the closed cone (boundary eigenvalues clipped at 0)."""
    if x.is_complex:
        raise NotInClosedCone("second argument must be a real element")
    if not jordan.in_closed_cone(x):
        raise NotInClosedCone("second argument must lie in the closed cone")
    return jordan.quad_apply(jordan.sqrt_closed(x), z)


def phi_eval2(cone: ConeParams, m, z: JordanElement, x: JordanElement) -> complex:
    """Two-argument spherical polynomial Phi_m(z, x) = Phi_m(P(x^(1/2)) z)."""
    return phi_eval(cone, m, kernel_argument(z, x))


# -- Haar Monte-Carlo oracle ---------------------------------------------------

def principal_minors(a: np.ndarray) -> np.ndarray:
    """Leading principal minors Delta_1..Delta_r of (a batch of) matrices."""
    r = a.shape[-1]
    return np.stack([np.linalg.det(a[..., :k, :k]) for k in range(1, r + 1)], axis=-1)


def generalized_power(minors: np.ndarray, m: Partition) -> np.ndarray:
    """Delta_m = Delta_1^(m1-m2) ... Delta_r^(m_r) from principal minors."""
    out = np.ones(minors.shape[:-1], dtype=minors.dtype)
    r = len(m)
    for k in range(r):
        nxt = m[k + 1] if k + 1 < r else 0
        out = out * minors[..., k] ** (m[k] - nxt)
    return out


@dataclass(frozen=True)
class MonteCarloValue:
    value: complex
    stderr: float
    samples: int


def spherical_via_haar(cone: ConeParams, m, x: JordanElement, samples: int, seed) -> MonteCarloValue:
    """Average of Delta_m(k x) over Haar-distributed k (matrix families of rank >= 2)."""
    from .cone import Family

    if cone.family in (Family.LORENTZ, Family.REAL_LINE) or cone.rank == 1:
        raise UnsupportedBackend("Haar oracle uses principal minors of matrix payloads")
    m = as_partition(m, cone.rank)
    if sum(m) == 0:
        return MonteCarloValue(1.0, 0.0, samples)
    rng = np.random.default_rng(seed)
    ks = jordan.haar_kl_batch(cone, samples, rng)
    kx = jordan.kl_act(cone, ks, x.data)
    vals = generalized_power(principal_minors(kx), m)
    if not x.is_complex:
        vals = vals.real
    mean = complex(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / np.sqrt(samples))
    return MonteCarloValue(mean, stderr, samples)
