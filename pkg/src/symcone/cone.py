"""Structure constants of a simple symmetric cone and the combinatorics built on them.

Everything here is a pure function of a :class:`ConeParams` and, where relevant,
a partition.  Partitions are plain tuples of non-negative integers of length
``rank``, weakly decreasing.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import InvalidStep, PoleError

Partition = tuple[int, ...]


class Family(enum.Enum):
    REAL_LINE = "line"
    REAL_SYM = "realsym"
    COMPLEX_HERM = "complexherm"
    LORENTZ = "lorentz"


@dataclass(frozen=True)
class ConeParams:
    """Rank ``r``, Peirce invariant ``d`` and dimension ``n`` of a simple cone."""

    rank: int
    peirce_d: int
    dim_n: int
    family: Family

    def __post_init__(self):
        r, d, n = self.rank, self.peirce_d, self.dim_n
        if r < 1 or d < 1 or n < 1:
            raise ValueError(f"invalid cone parameters r={r} d={d} n={n}")
        if 2 * n != 2 * r + r * (r - 1) * d:
            raise ValueError(f"n={n} inconsistent with r={r}, d={d}")
        fam = self.family
        if fam is Family.REAL_LINE and r != 1:
            raise ValueError("the real line has rank 1")
        if fam is Family.REAL_SYM and d != 1 and r > 1:
            raise ValueError("real symmetric matrices have d=1")
        if fam is Family.COMPLEX_HERM and d != 2 and r > 1:
            raise ValueError("complex Hermitian matrices have d=2")
        if fam is Family.LORENTZ and (r != 2 or d != n - 2):
            raise ValueError("Lorentz cones have r=2, d=n-2")

    @classmethod
    def line(cls) -> ConeParams:
        return cls(1, 1, 1, Family.REAL_LINE)

    @classmethod
    def realsym(cls, r: int) -> ConeParams:
        return cls(r, 1, r * (r + 1) // 2, Family.REAL_SYM)

    @classmethod
    def complexherm(cls, r: int) -> ConeParams:
        return cls(r, 2, r * r, Family.COMPLEX_HERM)

    @classmethod
    def lorentz(cls, n: int) -> ConeParams:
        if n < 3:
            raise ValueError("Lorentz cone needs n >= 3")
        return cls(2, n - 2, n, Family.LORENTZ)

    @classmethod
    def parse(cls, spec: str) -> ConeParams:
        """Parse ``line``, ``realsym:r``, ``complexherm:r`` or ``lorentz:n``."""
        name, _, arg = spec.strip().lower().partition(":")
        if name == "line" and not arg:
            return cls.line()
        builders = {"realsym": cls.realsym, "complexherm": cls.complexherm, "lorentz": cls.lorentz}
        if name not in builders or not arg:
            raise ValueError(f"bad cone specifier {spec!r}")
        return builders[name](int(arg))

    @property
    def half_d(self) -> float:
        return self.peirce_d / 2

    @property
    def n_over_r(self) -> float:
        return self.dim_n / self.rank

    @property
    def alpha(self) -> Fraction:
        """Jack parameter 2/d."""
        return Fraction(2, self.peirce_d)

    def __str__(self) -> str:
        if self.family is Family.REAL_LINE:
            return "line"
        if self.family is Family.LORENTZ:
            return f"lorentz:{self.dim_n}"
        return f"{self.family.value}:{self.rank}"


# -- partitions --------------------------------------------------------------

def is_partition(m, r: int | None = None) -> bool:
    m = tuple(m)
    if r is not None and len(m) != r:
        return False
    return all(isinstance(p, (int, np.integer)) for p in m) and all(
        m[i] >= m[i + 1] for i in range(len(m) - 1)
    ) and (not m or m[-1] >= 0)


def as_partition(m, r: int) -> Partition:
    """Normalize ``m`` to a length-``r`` partition, padding with zeros.

    A bare integer is read as the one-part partition ``(m,)``.
    """
    if isinstance(m, (int, np.integer)):
        m = (m,)
    m = tuple(int(p) for p in m)
    if len(m) > r:
        if any(m[r:]):
            raise ValueError(f"{m} has more than {r} nonzero parts")
        m = m[:r]
    m = m + (0,) * (r - len(m))
    if not is_partition(m):
        raise ValueError(f"{m} is not a partition")
    return m


def weight(m: Partition) -> int:
    return sum(m)


def _partitions_of(k: int, r: int, largest: int) -> list[Partition]:
    # partitions of k into at most r parts, each <= largest, in decreasing lex order
    if r == 0:
        return [()] if k == 0 else []
    out = []
    for first in range(min(k, largest), -1, -1):
        if first * r < k:
            break
        for rest in _partitions_of(k - first, r - 1, first):
            out.append((first,) + rest)
    return out


@lru_cache(maxsize=None)
def partitions_of_weight(k: int, r: int) -> tuple[Partition, ...]:
    """All partitions of ``k`` with at most ``r`` parts, reverse-lexicographic order."""
    return tuple(_partitions_of(k, r, k))


def enumerate_partitions(r: int, max_weight: int) -> list[Partition]:
    """All length-``r`` partitions of weight at most ``max_weight``.

    Ordered by weight, then reverse-lexicographically within a weight
    (so ``(2, 0)`` precedes ``(1, 1)``).  Every truncated sum in the package
    iterates in this order.
    """
    if r < 1 or max_weight < 0:
        raise ValueError("need r >= 1 and max_weight >= 0")
    out: list[Partition] = []
    for k in range(max_weight + 1):
        out.extend(partitions_of_weight(k, r))
    return out


def dominates(a: Partition, b: Partition) -> bool:
    """True when ``a >= b`` in dominance order (equal weights assumed)."""
    sa = sb = 0
    for x, y in zip(a, b):
        sa += x
        sb += y
        if sa < sb:
            return False
    return sa == sb


def add_box(m: Partition, j: int) -> Partition | None:
    """``m + e_j`` (0-based ``j``) or None when that is not a partition."""
    if j > 0 and m[j - 1] == m[j]:
        return None
    return m[:j] + (m[j] + 1,) + m[j + 1:]


def remove_box(m: Partition, j: int) -> Partition | None:
    if m[j] == 0 or (j + 1 < len(m) and m[j + 1] == m[j]):
        return None
    return m[:j] + (m[j] - 1,) + m[j + 1:]


def contained(n: Partition, m: Partition) -> bool:
    return all(a <= b for a, b in zip(n, m))


# -- Gamma and Pochhammer ----------------------------------------------------

def _is_pole(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def log_gamma_omega(cone: ConeParams, nu: float) -> tuple[float, float]:
    """(sign, log|Gamma_Omega(nu)|), for arguments where the value overflows."""
    log_abs = 0.5 * (cone.dim_n - cone.rank) * math.log(2 * math.pi)
    sign = 1.0
    for j in range(cone.rank):
        a = nu - j * cone.half_d
        if _is_pole(a):
            raise PoleError(f"Gamma_Omega({nu}) has a pole: Gamma({a})")
        log_abs += float(special.gammaln(a))
        sign *= float(special.gammasgn(a))
    return sign, log_abs


def gamma_omega(cone: ConeParams, nu: float) -> float:
    """Gamma function of the cone: (2 pi)^((n-r)/2) prod_j Gamma(nu - (j-1) d/2)."""
    sign, log_abs = log_gamma_omega(cone, nu)
    return sign * math.exp(log_abs)


def rising(a: float, k: int) -> float:
    """Classical rising factorial, multiplied left to right."""
    out = 1.0
    for s in range(k):
        out *= a + s
    return out


def pochhammer(cone: ConeParams, nu: float, m: Partition) -> float:
    """Generalized Pochhammer symbol prod_j (nu - (j-1) d/2)_{m_j}."""
    out = 1.0
    for j, mj in enumerate(m):
        out *= rising(nu - j * cone.half_d, mj)
    return out


# -- dimensions of K-types -----------------------------------------------------

def dim_km(cone: ConeParams, m: Partition) -> float:
    """Dimension d_m of the polynomial space P_m, by the pole-free product formula."""
    h, d = cone.half_d, cone.peirce_d
    r = cone.rank
    out = 1.0
    for i in range(r):
        for j in range(i + 1, r):
            # 1-based indices only enter through the difference i - j
            diff = m[j] - m[i]
            num = ((i - j) * h + diff) * rising(diff + (i - j - 1) * h + 1, d - 1)
            den = ((i - j) * h) * rising((i - j - 1) * h + 1, d - 1)
            out *= num / den
    if abs(out - round(out)) >= 1e-6 * max(1.0, abs(out)):
        raise ArithmeticError(f"d_m={out} for m={m} is not an integer")
    return out


def dim_ratio(cone: ConeParams, m: Partition, j: int) -> float:
    """d_{m+e_j}/d_m by the quotient product (``j`` is 0-based)."""
    if add_box(m, j) is None:
        raise InvalidStep(f"{m} + e_{j + 1} is not a partition")
    h = cone.half_d
    out = 1.0
    for i in range(cone.rank):
        if i == j:
            continue
        diff = m[j] - m[i]
        num = ((i - j) * h + diff + 1) * (diff + (i - j + 1) * h)
        den = ((i - j) * h + diff) * (diff + (i - j - 1) * h + 1)
        out *= num / den
    return out


def dim_km_cfunction(cone: ConeParams, m: Partition, eps: str = "1e-25") -> float:
    """d_m from the c-function quotient of Gamma functions.

    Poles of the individual Gamma factors are resolved by shifting rho by a
    tiny generic vector and evaluating in high precision.  Used as an independent
    check on :func:`dim_km` only.
    """
    import mpmath

    with mpmath.workdps(60):
        r = cone.rank
        h = mpmath.mpf(cone.peirce_d) / 2
        delta = mpmath.mpf(eps)
        pert = [delta * mpmath.mpf(k * k + 1) / 7 for k in range(r)]

        def c(lam):
            out = mpmath.mpf(1)
            for i in range(r):
                for j in range(i + 1, r):
                    x = lam[j] - lam[i]
                    out *= (mpmath.gamma(x) * mpmath.gamma((j - i + 1) * h)) / (
                        mpmath.gamma(x + h) * mpmath.gamma((j - i) * h)
                    )
            return out

        rho = [(2 * (k + 1) - r - 1) * h / 2 + pert[k] for k in range(r)]
        rho_m = [rho[k] - m[k] for k in range(r)]
        m_rho = [m[k] - rho[k] for k in range(r)]
        val = c(rho) * c([-x for x in rho]) / (c(rho_m) * c(m_rho))
        return float(val)


# -- Wallach set ------------------------------------------------------------

class WallachKind(enum.Enum):
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class WallachPoint:
    nu: float
    kind: WallachKind
    k: int | None = None


def wallach_classify(cone: ConeParams, nu: float) -> WallachPoint:
    for k in range(cone.rank):
        if abs(nu - k * cone.half_d) < 1e-12:
            return WallachPoint(nu, WallachKind.DISCRETE, k)
    if nu > (cone.rank - 1) * cone.half_d:
        return WallachPoint(nu, WallachKind.CONTINUOUS)
    return WallachPoint(nu, WallachKind.OUTSIDE)


def in_continuous_wallach(cone: ConeParams, nu: float) -> bool:
    return nu > (cone.rank - 1) * cone.half_d
