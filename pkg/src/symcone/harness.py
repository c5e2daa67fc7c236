"""Numerical verification of the generating-function, expansion and recurrence identities.

Every check returns a :class:`CheckReport`.  Deterministic checks pass when
the residual is at most the tolerance; Monte-Carlo checks pass when it is at
most max(tol, 3 * stderr).
"""
from __future__ import annotations

import math
import zlib
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bessel, jordan, laguerre, models, spherical, transforms
from .bessel import SeriesTruncation
from .cone import (
    ConeParams,
    dim_km,
    dim_ratio,
    enumerate_partitions,
    gamma_omega,
    in_continuous_wallach,
    pochhammer,
    remove_box,
)
from .errors import DomainError, OutsideContinuousWallach, UnsupportedBackend
from .jordan import JordanElement
from .models import Model, delta_power

DEFAULT_HAAR_SAMPLES = 100_000


@dataclass
class CheckReport:
    suite: str
    identity: str
    cone: str
    nu: float
    point: str
    max_weight: int
    residual: float
    tol: float
    stderr: float = 0.0
    passed: bool = field(init=False)
    seed: int | None = None

    def __post_init__(self):
        bound = max(self.tol, 3 * self.stderr)
        self.passed = bool(np.isfinite(self.residual) and self.residual <= bound)

    def as_row(self) -> dict:
        row = asdict(self)
        row["M"] = row.pop("max_weight")
        row["pass"] = row.pop("passed")
        return {k: row[k] for k in COLUMNS}


COLUMNS = ("suite", "identity", "cone", "nu", "point", "M", "residual", "tol", "stderr", "pass", "seed")


# -- helpers -------------------------------------------------------------------

def check_rng(master_seed: int, check_id: str) -> np.random.Generator:
    """Independent stream per check, derived from (master seed, check id)."""
    return np.random.default_rng(np.random.SeedSequence([master_seed, zlib.crc32(check_id.encode())]))


def describe(x) -> str:
    """Compact text form of a point for report rows."""
    if isinstance(x, JordanElement):
        vals = []
        for v in x.data.reshape(-1):
            v = complex(v)
            vals.append(f"{v.real:.6g}" if v.imag == 0 else f"{v:.6g}")
        return "[" + " ".join(vals) + "]"
    if isinstance(x, dict):
        return ";".join(f"{k}={describe(v)}" for k, v in x.items())
    if isinstance(x, (int, float)):
        return f"{x:.6g}"
    return str(x)


def is_frame_diagonal(x: JordanElement) -> bool:
    if jordan.is_matrix_family(x.cone):
        return bool(np.allclose(x.data, np.diag(np.diag(x.data)), atol=1e-14))
    return bool(np.allclose(x.data[2:], 0, atol=1e-14))


def is_scalar(x: JordanElement) -> bool:
    c = complex(jordan.jtrace(x)) / x.cone.rank
    return bool(np.allclose(x.data, (jordan.identity(x.cone) * c).data, atol=1e-14))


@dataclass(frozen=True)
class HaarAverage:
    value: complex
    stderr: float
    route: str


def haar_average(cone: ConeParams, f, a: JordanElement, samples: int, rng, antithetic: bool = True) -> HaarAverage:
    """Monte-Carlo average of f(k a) over K cap L; ``f`` maps stacked payloads to values.

    With ``antithetic`` each k is paired with k^{-1} and the standard error is
    computed from the pair means.
    """
    half = samples // 2 if antithetic else samples
    ks = jordan.haar_kl_batch(cone, half, rng)
    vals = f(jordan.kl_act(cone, ks, a.data))
    if antithetic:
        kinv = np.conj(np.swapaxes(ks, -1, -2))
        vals = 0.5 * (vals + f(jordan.kl_act(cone, kinv, a.data)))
    mean = complex(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
    return HaarAverage(mean, stderr, "montecarlo")


def orbit_average(
    cone: ConeParams, f, a: JordanElement, partner: JordanElement | None, samples: int, rng, route: str = "auto"
) -> HaarAverage:
    """Average of f(k a) over K cap L.

    ``partner`` is the other element the integrand depends on.  Routes:
    ``exact`` when a or the partner is a multiple of e (the orbit is a point,
    or the integrand is K-invariant), ``quadrature`` for rank 2 with both
    elements frame-diagonal, ``montecarlo`` otherwise.
    """
    if route == "auto":
        if cone.rank == 1 or is_scalar(a) or (partner is not None and is_scalar(partner)):
            route = "exact"
        elif cone.rank == 2 and is_frame_diagonal(a) and (partner is None or is_frame_diagonal(partner)):
            route = "quadrature"
        else:
            route = "montecarlo"
    if route == "exact":
        return HaarAverage(complex(f(a.data[None])[0]), 0.0, "exact")
    if route == "quadrature":
        ks, w = jordan.rank2_kl_quadrature(cone, 64)
        vals = f(jordan.kl_act(cone, ks, a.data))
        return HaarAverage(complex(np.sum(w * vals)), 0.0, "quadrature")
    return haar_average(cone, f, a, samples, rng)


def _trace_form_batch(cone: ConeParams, batch, b: JordanElement):
    return jordan.payload_trace_form(cone, batch, b.data)


def _series_parts(cone, nu, max_weight, u: JordanElement | None):
    rank = cone.rank if u is None else bessel.numerical_rank(jordan.spectral_values(u))
    return bessel.series_partitions(cone, nu, max_weight, rank)


# -- generating function ------------------------------------------------------------

def genfct_lhs(cone, nu, w, u, max_weight, parts=None):
    """Partial sums by weight of sum_m d_m / (n/r)_m Phi_m(w) l_m(u)."""
    parts = parts or _series_parts(cone, nu, max_weight, u)
    coef = np.array([dim_km(cone, m) / pochhammer(cone, cone.n_over_r, m) for m in parts])
    vals = coef * spherical.phi_eval_many(cone, parts, w) * laguerre.laguerre_fn_many(cone, nu, parts, u)
    weights = np.array([sum(m) for m in parts])
    return np.array([vals[weights == k].sum() for k in range(max_weight + 1)])


def genfct_rhs(cone, nu, w, u, samples, rng, route="auto") -> HaarAverage:
    e = jordan.identity(cone)
    b = jordan.jmul(e + w, jordan.jinv(e - w))
    avg = orbit_average(cone, lambda batch: np.exp(-_trace_form_batch(cone, batch, b)), u, b, samples, rng, route)
    pre = delta_power(e - w, -nu)
    return HaarAverage(pre * avg.value, abs(pre) * avg.stderr, avg.route)


def check_genfct(
    cone: ConeParams,
    nu: float,
    w: JordanElement,
    u: JordanElement,
    trunc: SeriesTruncation | None = None,
    haar_samples: int = DEFAULT_HAAR_SAMPLES,
    seed: int = 0,
    tol: float = 1e-7,
    route: str = "auto",
) -> CheckReport:
    """Generating function of the Laguerre functions at (w, u)."""
    trunc = trunc or SeriesTruncation(30)
    models.check_domain(Model.DISC, w)
    ident = "genfct"
    rng = check_rng(seed, f"{ident}:{cone}:{nu}:{describe(w)}:{describe(u)}")
    lhs = genfct_lhs(cone, nu, w, u, trunc.max_weight).sum()
    rhs = genfct_rhs(cone, nu, w, u, haar_samples, rng, route)
    return CheckReport(
        "genfct", f"{ident}[{rhs.route}]", str(cone), nu, describe({"w": w, "u": u}),
        trunc.max_weight, float(abs(lhs - rhs.value)), tol, rhs.stderr, seed,
    )


def genfct_poly_lhs(cone, nu, x, u, max_weight, parts=None):
    parts = parts or _series_parts(cone, nu, max_weight, u)
    coef = np.array([dim_km(cone, m) / pochhammer(cone, cone.n_over_r, m) for m in parts])
    vals = coef * spherical.phi_eval_many(cone, parts, x) * laguerre.laguerre_poly_many(cone, nu, parts, u)
    weights = np.array([sum(m) for m in parts])
    return np.array([vals[weights == k].sum() for k in range(max_weight + 1)])


def check_genfct_poly(
    cone: ConeParams,
    nu: float,
    x: JordanElement,
    u: JordanElement,
    trunc: SeriesTruncation | None = None,
    haar_samples: int = DEFAULT_HAAR_SAMPLES,
    seed: int = 0,
    tol: float = 1e-7,
    route: str = "auto",
) -> CheckReport:
    """Generating function of the Laguerre polynomials: kernel exp(-(ku | x (e - x)^{-1}))."""
    trunc = trunc or SeriesTruncation(30)
    models.check_domain(Model.DISC, x)
    rng = check_rng(seed, f"genfct-poly:{cone}:{nu}:{describe(x)}:{describe(u)}")
    e = jordan.identity(cone)
    b = jordan.jmul(x, jordan.jinv(e - x))
    avg = orbit_average(cone, lambda batch: np.exp(-_trace_form_batch(cone, batch, b)), u, b, haar_samples, rng, route)
    pre = delta_power(e - x, -nu)
    lhs = genfct_poly_lhs(cone, nu, x, u, trunc.max_weight).sum()
    return CheckReport(
        "genfct", f"genfct-poly[{avg.route}]", str(cone), nu, describe({"x": x, "u": u}),
        trunc.max_weight, float(abs(lhs - pre * avg.value)), tol, abs(pre) * avg.stderr, seed,
    )


def check_genfct_equivalence(
    cone: ConeParams, nu: float, w: JordanElement, u: JordanElement, max_weight: int = 20, tol: float = 1e-10
) -> CheckReport:
    """Termwise rewriting between the two generating functions: F(w, u) = e^{-tr u} G(w, 2u)."""
    f = genfct_lhs(cone, nu, w, u, max_weight)
    g = genfct_poly_lhs(cone, nu, w, u * 2.0, max_weight)
    scale = np.exp(-jordan.jtrace(u))
    res = float(np.max(np.abs(f - scale * g)))
    return CheckReport("genfct", "genfct-equivalence", str(cone), nu, describe({"w": w, "u": u}), max_weight, res, tol)


def check_wallach_genfct(
    s: float = 0.7, w_values=(0.4, -0.3), max_weight: int = 30, tol: float = 1e-7
) -> CheckReport:
    """Generating function at the discrete point nu = d/2 on ComplexHerm(2) with u = diag(s, 0).

    Only partitions with m_2 = 0 enter the sum; the right side is evaluated by
    the exact rank-2 angular rule.
    """
    cone = ConeParams.complexherm(2)
    nu = cone.half_d
    u = jordan.frame_element(cone, [s, 0.0])
    w = jordan.frame_element(cone, list(w_values))
    parts = [m for m in enumerate_partitions(2, max_weight) if m[1] == 0]
    lhs = genfct_lhs(cone, nu, w, u, max_weight, parts).sum()
    rhs = genfct_rhs(cone, nu, w, u, 0, None, route="quadrature")
    return CheckReport(
        "genfct", "genfct-wallach[quadrature]", str(cone), nu, describe({"w": w, "u": u}),
        max_weight, float(abs(lhs - rhs.value)), tol,
    )


# -- the auxiliary series ------------------------------------------------------------

def check_fk_exercise1(
    cone: ConeParams,
    nu: float,
    x: JordanElement,
    y: JordanElement,
    trunc: SeriesTruncation | None = None,
    haar_samples: int = DEFAULT_HAAR_SAMPLES,
    seed: int = 0,
    tol: float = 1e-9,
    route: str = "auto",
) -> CheckReport:
    """sum_m d_m (nu)_m / (n/r)_m Phi_m(x) Phi_m(y) = Delta(x)^(-nu) avg_k Delta(k x^{-1} - y)^(-nu)."""
    trunc = trunc or SeriesTruncation(40)
    if not jordan.in_cone(x):
        raise DomainError("x must lie in the cone")
    size = jordan.spectral_norm(x) * jordan.spectral_norm(y)
    if size >= 0.8:
        raise DomainError(f"series needs |x| |y| < 0.8, got {size:.3g}")
    rng = check_rng(seed, f"fk-ex1:{cone}:{nu}:{describe(x)}:{describe(y)}")
    parts = enumerate_partitions(cone.rank, trunc.max_weight)
    coef = np.array([dim_km(cone, m) * pochhammer(cone, nu, m) / pochhammer(cone, cone.n_over_r, m) for m in parts])
    lhs = complex(np.sum(coef * spherical.phi_eval_many(cone, parts, x) * spherical.phi_eval_many(cone, parts, y)))
    xinv = jordan.jinv(x)

    def f(batch):
        det = jordan.payload_det(cone, batch - y.data)
        return np.exp(-nu * np.log(det.astype(complex)))

    avg = orbit_average(cone, f, xinv, y, haar_samples, rng, route)
    pre = complex(jordan.jdet(x)) ** (-nu)
    return CheckReport(
        "fk-ex1", f"fk-exercise1[{avg.route}]", str(cone), nu, describe({"x": x, "y": y}),
        trunc.max_weight, float(abs(lhs - pre * avg.value)), tol, abs(pre) * avg.stderr, seed,
    )


# -- Fock model ---------------------------------------------------------------

def fock_lhs(cone, nu, z, x, max_weight, parts=None):
    """sum_m (-1)^|m| d_m / (2^|m| (n/r)_m (nu)_m) Phi_m(z) L_m(2x), by weight shell."""
    parts = parts or _series_parts(cone, nu, max_weight, x)
    coef = np.array([
        (-0.5) ** sum(m) * dim_km(cone, m) / (pochhammer(cone, cone.n_over_r, m) * pochhammer(cone, nu, m))
        for m in parts
    ])
    vals = coef * spherical.phi_eval_many(cone, parts, z) * laguerre.laguerre_poly_many(cone, nu, parts, x * 2.0)
    weights = np.array([sum(m) for m in parts])
    return np.array([vals[weights == k].sum() for k in range(max_weight + 1)])


def check_fock_genfct(
    cone: ConeParams,
    nu: float,
    z: JordanElement,
    x: JordanElement,
    trunc: SeriesTruncation | None = None,
    haar_samples: int = 2000,
    seed: int = 0,
    tol: float = 1e-8,
    route: str = "auto",
) -> CheckReport:
    """Fock-model kernel: the Laguerre series against e^{-tr z / 2} avg_k I_nu(z, kx)."""
    trunc = trunc or SeriesTruncation(40)
    rng = check_rng(seed, f"fock:{cone}:{nu}:{describe(z)}:{describe(x)}")
    lhs = fock_lhs(cone, nu, z, x, trunc.max_weight).sum()
    inner = SeriesTruncation(trunc.max_weight, 1e-6)

    def f(batch):
        return np.array([bessel.ibessel2(cone, nu, z, JordanElement(cone, p), inner) for p in batch])

    avg = orbit_average(cone, f, x, z, haar_samples, rng, route)
    pre = complex(np.exp(-jordan.jtrace(z) / 2))
    return CheckReport(
        "genfct-fock", f"fock-kernel[{avg.route}]", str(cone), nu, describe({"z": z, "x": x}),
        trunc.max_weight, float(abs(lhs - pre * avg.value)), tol, abs(pre) * avg.stderr, seed,
    )


def check_fock_scalar_x(
    cone: ConeParams, nu: float, z: JordanElement, t: float, max_weight: int = 40, tol: float = 1e-8
) -> CheckReport:
    """x = te: the Laguerre series equals e^{-tr z / 2} I_nu(t z)."""
    x = jordan.scalar_element(cone, t)
    lhs = fock_lhs(cone, nu, z, x, max_weight).sum()
    rhs = complex(np.exp(-jordan.jtrace(z) / 2)) * bessel.ibessel(cone, nu, z * t, SeriesTruncation(max_weight, 1e-6))
    return CheckReport(
        "genfct-fock", "fock-x=te", str(cone), nu, describe({"z": z, "t": t}), max_weight,
        float(abs(lhs - rhs)), tol,
    )


def fock_scalar_z_lhs(cone, nu, t, x, max_weight, prefactor: str = "rt"):
    """sum_m (-t)^|m| d_m / (2^|m| (n/r)_m (nu)_m) L_m(2x), times e^{rt/2}.

    Setting z = te in the Fock kernel identity gives the prefactor
    e^{tr(te)/2} = e^{rt/2}.  ``prefactor="tx"`` uses e^{tr(tx)/2} instead,
    which only agrees when tr x = r; it is kept to show the difference.
    """
    parts = _series_parts(cone, nu, max_weight, x)
    coef = np.array([
        (-t / 2) ** sum(m) * dim_km(cone, m) / (pochhammer(cone, cone.n_over_r, m) * pochhammer(cone, nu, m))
        for m in parts
    ])
    s = complex(np.sum(coef * laguerre.laguerre_poly_many(cone, nu, parts, x * 2.0)))
    arg = cone.rank * t if prefactor == "rt" else t * jordan.jtrace(x)
    return complex(np.exp(arg / 2)) * s


def check_fock_scalar_z(
    cone: ConeParams, nu: float, t: complex, x: JordanElement, max_weight: int = 40, tol: float = 1e-8,
    prefactor: str = "rt",
) -> CheckReport:
    """z = te: e^{rt/2} times the Laguerre series equals I_nu(t x)."""
    lhs = fock_scalar_z_lhs(cone, nu, t, x, max_weight, prefactor)
    rhs = bessel.ibessel(cone, nu, x * t, SeriesTruncation(max_weight, 1e-6))
    return CheckReport(
        "genfct-fock", f"fock-z=te[{prefactor}]", str(cone), nu, describe({"t": t, "x": x}), max_weight,
        float(abs(lhs - rhs)), tol,
    )


def check_fock_zero_x(cone: ConeParams, nu: float, z: JordanElement, max_weight: int = 40, tol: float = 1e-9):
    """x = 0: the series is the spherical expansion of e^{tr w} at w = -z/2."""
    x = jordan.scalar_element(cone, 0.0)
    lhs = fock_lhs(cone, nu, z, x, max_weight).sum()
    rhs = complex(np.exp(-jordan.jtrace(z) / 2))
    return CheckReport(
        "genfct-fock", "fock-x=0", str(cone), nu, describe({"z": z}), max_weight, float(abs(lhs - rhs)), tol
    )


def check_exp_expansion(cone: ConeParams, w: JordanElement, max_weight: int = 20, tol: float = 1e-8) -> CheckReport:
    """sum_m d_m / (n/r)_m Phi_m(w) against e^{tr w}."""
    parts = enumerate_partitions(cone.rank, max_weight)
    coef = np.array([dim_km(cone, m) / pochhammer(cone, cone.n_over_r, m) for m in parts])
    lhs = complex(np.sum(coef * spherical.phi_eval_many(cone, parts, w)))
    res = abs(lhs - complex(np.exp(jordan.jtrace(w))))
    return CheckReport("spherical", "exp-expansion", str(cone), float("nan"), describe(w), max_weight, float(res), tol)


# -- K-type expansions ------------------------------------------------------------

def check_expansion(
    model: Model,
    cone: ConeParams,
    nu: float,
    t: float,
    z: JordanElement,
    max_weight: int = 40,
    tol: float = 1e-7,
    decay_slack: float = 1.5,
) -> list[CheckReport]:
    """Partial sum at ``max_weight`` against the closed form, plus the decay check at half the weight."""
    sums = models.expansion_partial_sums(model, cone, nu, t, z, max_weight)
    closed = models.whittaker_closed_form(model, cone, nu, t, z, SeriesTruncation(max_weight, 1e-6))
    res_full = float(abs(sums.value - closed))
    half = max_weight // 2
    res_half = float(abs(sums.upto(half) - closed))
    pt = describe(z)
    reports = [
        CheckReport("expansions", f"expansion-{model.value}", str(cone), nu, f"t={t:.6g};z={pt}", max_weight, res_full, tol),
        # residual(2M0) <= slack * residual(M0), written as a residual that must not exceed 0
        CheckReport(
            "expansions", f"expansion-{model.value}-decay", str(cone), nu, f"t={t:.6g};z={pt}", max_weight,
            max(0.0, res_full - decay_slack * res_half), 0.0,
        ),
    ]
    return reports


def gaussian_bump(center: float, width: float):
    def f(x):
        return np.exp(-0.5 * ((np.asarray(x) - center) / width) ** 2)

    return f


def l2_pairing(nu: float, t: float, max_weight: int, width: float = 0.05, nodes: int = 400) -> np.ndarray:
    """Partial sums over M of sum_m coef_m <l_m, phi> for a Gaussian bump phi around t (rank 1).

    The coefficients are those of the L^2-model expansion of the point
    evaluation at t, so the partial sums approach phi(t) = 1.  With the
    orthonormal functions e_m = l_m / |l_m| each term is e_m(t) <e_m, phi>.
    """
    from scipy.special import roots_legendre

    phi = gaussian_bump(t, width)
    lo, hi = max(t - 12 * width, 0.0), t + 12 * width
    xg, wg = roots_legendre(nodes)
    x = 0.5 * (hi - lo) * xg + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * wg
    e = laguerre.laguerre_fn_rank1_normalized(nu, max_weight, np.concatenate([x, [t]]))
    e_x, e_t = e[:, :-1], e[:, -1]
    measure = 2 / math.gamma(nu) * (2 * x) ** (nu - 1)
    inner = e_x @ (w * phi(x) * measure)
    return np.cumsum(e_t * inner)


def check_l2_pairing(nu: float = 2.0, t: float = 0.1, max_weight: int = 200, width: float = 0.05, tol: float = 1e-2):
    sums = l2_pairing(nu, t, max_weight, width)
    res = float(abs(sums[-1] - 1.0))
    return CheckReport(
        "expansions", "expansion-l2-pairing", "line", nu, f"t={t:.6g};width={width:.6g}", max_weight, res, tol
    )


def check_multiplier(cone: ConeParams, nu: float, t: float, x: JordanElement, weights=(10, 20, 40)) -> list[CheckReport]:
    """Residual of tr(x) S_M(x) = r t S_M(x) for the L^2 partial sums; recorded, not asserted."""
    out = []
    for m in weights:
        res = models.whittaker_multiplier_residual(cone, nu, t, x, SeriesTruncation(m, 1.0))
        out.append(CheckReport("expansions", "l2-multiplier", str(cone), nu, f"t={t:.6g};x={describe(x)}", m, res, math.inf))
    return out


# -- recurrence -------------------------------------------------------------------

def check_recurrence(cone: ConeParams, nu: float, x: JordanElement, max_weight: int = 10, tol: float = 1e-9) -> CheckReport:
    """Largest recurrence residual over |m| <= max_weight at x, scaled by 1 + |tr(x) l_m(x)|."""
    parts = enumerate_partitions(cone.rank, max_weight + 1)
    vals = dict(zip(parts, laguerre.laguerre_fn_many(cone, nu, parts, x)))
    tr = jordan.jtrace(x)
    worst = 0.0
    for m in enumerate_partitions(cone.rank, max_weight):
        lhs = tr * vals[m]
        res = abs(lhs - laguerre.recurrence_rhs(cone, nu, m, vals))
        worst = max(worst, res / (1 + abs(lhs)))
    return CheckReport("recurrence", "laguerre-recurrence", str(cone), nu, describe(x), max_weight, float(worst), tol)


def check_recurrence_implies_whittaker(
    cone: ConeParams, nu: float, t: float, max_weight: int = 8, tol: float = 1e-10
) -> list[CheckReport]:
    """The recurrence at x = te, the coefficient identity it implies, and the bookkeeping between them."""
    parts = enumerate_partitions(cone.rank, max_weight + 1)
    ell = dict(zip(parts, laguerre.laguerre_fn_many(cone, nu, parts, jordan.scalar_element(cone, t)).real))
    norm = {m: dim_km(cone, m) / (pochhammer(cone, cone.n_over_r, m) * pochhammer(cone, nu, m)) for m in parts}
    coeff = {m: norm[m] * ell[m] for m in parts}
    r = cone.rank
    rec_res = coef_res = book_res = 0.0
    h = cone.half_d
    for m in enumerate_partitions(cone.rank, max_weight):
        co = laguerre.recurrence_coeffs(cone, nu, m)
        # recurrence at te
        lhs = co.a * ell[m]
        scale = abs(co.a * ell[m]) + abs(r * t * ell[m])
        for j, up, down in laguerre.neighbours(m):
            if up is not None:
                lhs += co.b[j] * ell[up]
                scale += abs(co.b[j] * ell[up])
            if down is not None:
                lhs += co.c[j] * ell[down]
                scale += abs(co.c[j] * ell[down])
        rec_res = max(rec_res, abs(lhs - r * t * ell[m]) / (1 + scale))
        # coefficient form: lower neighbours carry b_{m-e_j, j}, upper ones c_{m+e_j, j}
        lhs = coeff[m] * co.a
        scale = abs(coeff[m] * co.a) + abs(r * t * coeff[m])
        for j, up, down in laguerre.neighbours(m):
            if down is not None:
                term = coeff[down] * laguerre.recurrence_coeffs(cone, nu, down).b[j]
                lhs += term
                scale += abs(term)
            if up is not None and up in coeff:
                term = coeff[up] * laguerre.recurrence_coeffs(cone, nu, up).c[j]
                lhs += term
                scale += abs(term)
        coef_res = max(coef_res, abs(lhs - r * t * coeff[m]) / (1 + scale))
        # bookkeeping: b_{m-e_j, j} = c_{m, j} d_m/d_{m-e_j} / step factors, via the quotient formulas
        for j, _, down in laguerre.neighbours(m):
            if down is None:
                continue
            b_down = laguerre.recurrence_coeffs(cone, nu, down).b[j]
            step = (cone.n_over_r - j * h + down[j]) * (nu - j * h + down[j])
            rewritten = co.c[j] * dim_ratio(cone, down, j) / step
            book_res = max(book_res, abs(b_down - rewritten) / (1 + abs(b_down)))
    point = f"t={t:.6g}"
    return [
        CheckReport("recurrence", "recurrence-at-te", str(cone), nu, point, max_weight, float(rec_res), tol),
        CheckReport("recurrence", "whittaker-coefficients", str(cone), nu, point, max_weight, float(coef_res), tol),
        CheckReport("recurrence", "bookkeeping", str(cone), nu, point, max_weight, float(book_res), tol),
    ]


# -- transforms --------------------------------------------------------------------

def transform_reports(nus=(1.5, 3.0), max_degree: int = 8, nodes: int = transforms.DEFAULT_NODES, tol: float = 1e-6):
    """Rank-1 eigen-relations of the Laplace and Segal-Bargmann transforms and the two norm formulas."""
    cone = ConeParams.line()
    out = []
    for nu in nus:
        worst = 0.0
        for z in (1j, 1 + 1j, 2j):
            for m in range(max_degree + 1):
                q = transforms.laplace_rank1(nu, transforms.laguerre_rank1_fn(nu, m), z, nodes)
                ref = pochhammer(cone, nu, (m,)) * models.psi_basis(cone, nu, m, jordan.scalar_element(cone, z))
                worst = max(worst, abs(q.value - ref) / max(abs(ref), pochhammer(cone, nu, (m,))))
        out.append(CheckReport("transforms", "laplace-of-laguerre", str(cone), nu, "z in {i,1+i,2i}", max_degree, worst, tol))
        worst = 0.0
        for z in (0.5, 1 + 0.5j):
            for m in range(max_degree + 1):
                q = transforms.segal_bargmann_rank1(nu, transforms.laguerre_rank1_fn(nu, m), z, nodes)
                ref = (-0.5) ** m * z**m
                # scale by the coefficient 2^-m when |z|^m makes the reference tiny
                worst = max(worst, abs(q.value - ref) / max(abs(ref), 0.5**m))
        out.append(CheckReport("transforms", "segal-bargmann-of-laguerre", str(cone), nu, "z in {0.5,1+0.5i}", max_degree, worst, tol))
        worst = 0.0
        for m in range(13):
            a = transforms.l2_norm_sq_rank1(nu, transforms.laguerre_rank1_fn(nu, m), nodes)
            b = laguerre.laguerre_norm_sq(cone, nu, (m,))
            worst = max(worst, abs(a - b) / b)
        out.append(CheckReport("transforms", "l2-norm", str(cone), nu, "m<=12", 12, worst, 1e-8))
        nu_disc = nu + 1
        worst = 0.0
        for m in range(13):
            a = transforms.disc_norm_sq_rank1(nu_disc, m)
            b = pochhammer(cone, cone.n_over_r, (m,)) / (dim_km(cone, (m,)) * pochhammer(cone, nu_disc, (m,)))
            worst = max(worst, abs(a - b) / b)
        out.append(CheckReport("transforms", "disc-norm", str(cone), nu_disc, "m<=12", 12, worst, 1e-8))
    return out


def laplace_identity_reports(tol_rank1: float = 1e-7, tol_rank2: float = 1e-8):
    out = []
    c1 = ConeParams.line()
    for m in (0, 1, 2, 4):
        res = transforms.laplace_of_laguerre_identity(c1, 2.5, m, jordan.scalar_element(c1, 1.7))
        out.append(CheckReport("transforms", "laplace-of-laguerre-poly", "line", 2.5, f"m={m};y=1.7", m, res, tol_rank1))
    for cone, nu in ((ConeParams.realsym(2), 2.5), (ConeParams.complexherm(2), 3.0)):
        y = jordan.frame_element(cone, [1.3, 0.8])
        for m in ((0, 0), (1, 0), (1, 1), (2, 1)):
            res = transforms.laplace_of_laguerre_identity(cone, nu, m, y)
            out.append(CheckReport(
                "transforms", "laplace-of-laguerre-poly[radial]", str(cone), nu, f"m={m};y=diag(1.3,0.8)",
                sum(m), res, tol_rank2,
            ))
    return out


def cayley_reports(tol: float = 1e-10):
    out = []
    for cone in (ConeParams.line(), ConeParams.realsym(2), ConeParams.complexherm(2)):
        rng = check_rng(0, f"cayley:{cone}")
        worst = 0.0
        nu = 2.5
        for _ in range(5):
            w = jordan.random_complex_element(cone, rng)
            w = w * (0.7 / jordan.spectral_norm(w))
            for m in enumerate_partitions(cone.rank, 6):
                val = transforms.cayley_apply(cone, nu, lambda z, m=m: models.psi_basis(cone, nu, m, z), w)
                worst = max(worst, abs(val - spherical.phi_eval(cone, m, w)))
        out.append(CheckReport("transforms", "cayley-psi-to-phi", str(cone), nu, "5 random w, |w|=0.7", 6, worst, tol))
    return out


# -- structure of the Jordan algebra --------------------------------------------------

def jordan_axiom_reports(count: int = 100, seed: int = 0, tol: float = 1e-10):
    cones = (
        ConeParams.line(), ConeParams.realsym(2), ConeParams.realsym(3),
        ConeParams.complexherm(2), ConeParams.complexherm(3), ConeParams.lorentz(3), ConeParams.lorentz(5),
    )
    out = []
    for cone in cones:
        rng = check_rng(seed, f"jordan:{cone}")
        unit = comm = jid = detp = inv = 0.0
        e = jordan.identity(cone)
        for _ in range(count):
            x = jordan.random_element(cone, rng)
            y = jordan.random_element(cone, rng)
            unit = max(unit, np.abs(jordan.jmul(e, x).data - x.data).max())
            comm = max(comm, np.abs(jordan.jmul(x, y).data - jordan.jmul(y, x).data).max())
            x2 = jordan.jmul(x, x)
            lhs = jordan.jmul(x2, jordan.jmul(x, y))
            rhs = jordan.jmul(x, jordan.jmul(x2, y))
            jid = max(jid, np.abs(lhs.data - rhs.data).max() / (1 + np.abs(lhs.data).max()))
        for _ in range(20):
            x = jordan.random_element(cone, rng)
            dp = float(np.linalg.det(jordan.quad_rep(x)))
            dd = float(np.real(jordan.jdet(x))) ** (2 * cone.n_over_r)
            detp = max(detp, abs(dp - dd) / abs(dd))
            xi = jordan.jinv(x)
            inv = max(inv, np.abs(jordan.jmul(x, xi).data - e.data).max())
        for name, val, t in (
            ("unit", unit, tol), ("commutativity", comm, tol), ("jordan-identity", jid, tol),
            ("det-quadratic-rep", detp, 1e-9), ("inverse", inv, 1e-8),
        ):
            out.append(CheckReport("jordan-axioms", name, str(cone), float("nan"), f"{count} random", 0, float(val), t, seed=seed))
        # Delta(a^-1 + b^-1) = Delta(a)^-1 Delta(b)^-1 Delta(a + b)
        worst = 0.0
        for _ in range(20):
            a = jordan.random_cone_element(cone, rng)
            b = jordan.random_cone_element(cone, rng)
            lhs = jordan.jdet(jordan.jinv(a) + jordan.jinv(b))
            rhs = jordan.jdet(a + b) / (jordan.jdet(a) * jordan.jdet(b))
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
        out.append(CheckReport("jordan-axioms", "det-inverse-sum", str(cone), float("nan"), "20 random", 0, float(worst), 1e-9, seed=seed))
        # Haar invariance of Phi_m
        worst = 0.0
        x = jordan.random_element(cone, rng)
        parts = enumerate_partitions(cone.rank, 8 if cone.rank < 3 else 6)
        base = spherical.phi_eval_many(cone, parts, x)
        for _ in range(20):
            k = jordan.haar_kl_batch(cone, 1, rng)[0]
            kx = JordanElement(cone, jordan.kl_act(cone, k, x.data))
            worst = max(worst, float(np.max(np.abs(spherical.phi_eval_many(cone, parts, kx) - base) / (1 + np.abs(base)))))
        out.append(CheckReport("jordan-axioms", "phi-haar-invariance", str(cone), float("nan"), "20 samples", max(map(sum, parts)), worst, 1e-9, seed=seed))
    return out


def jack_vs_haar_reports(samples: int = 100_000, seed: int = 0):
    """Jack-polynomial evaluation against the Haar average of generalized powers."""
    out = []
    for cone in (ConeParams.realsym(2), ConeParams.realsym(3), ConeParams.complexherm(2), ConeParams.complexherm(3)):
        rng = check_rng(seed, f"jack-haar:{cone}")
        x = jordan.frame_element(cone, rng.uniform(0.5, 1.5, cone.rank))
        for m in ((2, 0, 0), (1, 1, 0), (3, 1, 0), (2, 2, 2), (4, 1, 1)):
            m = m[: cone.rank]
            if cone.rank == 2 and sum(m) == 0:
                continue
            sub_seed = int(rng.integers(2**31))
            mc = spherical.spherical_via_haar(cone, m, x, samples, sub_seed)
            exact = spherical.phi_eval(cone, m, x)
            out.append(CheckReport(
                "jordan-axioms", "jack-vs-haar", str(cone), float("nan"), f"m={m};x={describe(x)}",
                sum(m), float(abs(mc.value - exact)), 1e-12, mc.stderr, sub_seed,
            ))
    return out


# -- suites ------------------------------------------------------------------------

@dataclass
class SuiteOptions:
    """Global knobs shared by every suite; ``None`` means the suite's own default."""

    seed: int = 0
    max_weight: int | None = None
    tol: float | None = None
    haar_samples: int = DEFAULT_HAAR_SAMPLES
    nodes: int = transforms.DEFAULT_NODES
    quick: bool = False
    cone: ConeParams | None = None
    nu: float | None = None
    t: float | None = None

    def weight(self, default: int) -> int:
        return default if self.max_weight is None else self.max_weight

    def tolerance(self, default: float) -> float:
        return default if self.tol is None else self.tol

    def samples(self) -> int:
        return min(self.haar_samples, 20_000) if self.quick else self.haar_samples


RANK2_CONES = ("realsym:2", "complexherm:2")


def _cones(opts: SuiteOptions, default):
    return [opts.cone] if opts.cone is not None else [ConeParams.parse(c) for c in default]


def _nus(opts: SuiteOptions, default):
    return [opts.nu] if opts.nu is not None else list(default)


def _ts(opts: SuiteOptions, default):
    return [opts.t] if opts.t is not None else list(default)


def disc_grid(cone: ConeParams, radius: float = 0.6, seed: int = 0) -> list[JordanElement]:
    """Points of the bounded domain with spectral norm <= radius, corners included."""
    e = jordan.identity(cone)
    pts = [e * 0.0]
    if cone.rank == 1:
        return pts + [e * radius, e * (-radius), e * (0.5j * radius), e * (radius * np.exp(0.7j))]
    pts += [e * radius, e * (-radius), e * (1j * radius), jordan.frame_element(cone, [radius, -radius / 2])]
    rng = check_rng(seed, f"disc-grid:{cone}")
    for _ in range(2):
        z = jordan.random_complex_element(cone, rng)
        pts.append(z * (radius / jordan.spectral_norm(z)))
    return pts


def genfct_rank1_grid(nu: float, max_weight: int = 60, tol: float = 1e-9) -> list[CheckReport]:
    """Rank one against the scalar closed form (1 - w)^(-nu) exp(-u (1 + w)/(1 - w))."""
    cone = ConeParams.line()
    out = []
    for wv in np.linspace(-0.5, 0.5, 5):
        for uv in (0.0, 0.25, 0.5, 1.0, 2.0):
            w, u = jordan.scalar_element(cone, wv), jordan.scalar_element(cone, uv)
            lhs = genfct_lhs(cone, nu, w, u, max_weight).sum()
            rhs = (1 - wv) ** (-nu) * math.exp(-uv * (1 + wv) / (1 - wv))
            out.append(CheckReport(
                "genfct", "genfct-rank1", str(cone), nu, f"w={wv:.6g};u={uv:.6g}", max_weight,
                float(abs(lhs - rhs)), tol,
            ))
    return out


def suite_genfct(opts: SuiteOptions) -> list[CheckReport]:
    out = []
    cones = _cones(opts, ("line",) + RANK2_CONES)
    for cone in cones:
        if cone.rank == 1:
            for nu in _nus(opts, (2.5,)):
                out += genfct_rank1_grid(nu, opts.weight(60), opts.tolerance(1e-9))
            continue
        M = opts.weight(30)
        for nu in _nus(opts, (2.0, 3.5)):
            for t in _ts(opts, (0.25, 0.5, 1.0)):
                u = jordan.scalar_element(cone, t)
                for w in disc_grid(cone, 0.6, opts.seed):
                    out.append(check_genfct(cone, nu, w, u, SeriesTruncation(M), seed=opts.seed, tol=opts.tolerance(1e-7)))
        # general u: the orbit average is a Haar Monte-Carlo mean
        rng = check_rng(opts.seed, f"genfct-mc-points:{cone}")
        for nu in _nus(opts, (2.5,)):
            u = jordan.random_cone_element(cone, rng, 0.3, 1.2)
            w = jordan.random_complex_element(cone, rng)
            w = w * (0.4 / jordan.spectral_norm(w))
            out.append(check_genfct(
                cone, nu, w, u, SeriesTruncation(M), opts.samples(), opts.seed, tol=0.0, route="montecarlo"
            ))
            out.append(check_genfct_equivalence(cone, nu, w, u))
            # frame-diagonal u: exact rank-2 angular rule
            ud = jordan.frame_element(cone, [1.0, 0.4])
            out.append(check_genfct(cone, nu, w, ud, SeriesTruncation(M), seed=opts.seed, tol=opts.tolerance(1e-7)))
            out.append(check_genfct_poly(
                cone, nu, jordan.frame_element(cone, [0.3, -0.2]), ud, SeriesTruncation(M), seed=opts.seed,
                tol=opts.tolerance(1e-7),
            ))
    if opts.cone is None or (opts.cone == ConeParams.complexherm(2)):
        out.append(check_wallach_genfct(max_weight=opts.weight(30), tol=opts.tolerance(1e-7)))
    return out


def suite_genfct_fock(opts: SuiteOptions) -> list[CheckReport]:
    out = []
    M = opts.weight(40)
    tol = opts.tolerance(1e-8)
    for cone in _cones(opts, ("line",) + RANK2_CONES + ("lorentz:4",)):
        for nu in _nus(opts, (cone.n_over_r + 0.5, cone.n_over_r + 2.0)):
            if cone.rank == 1:
                zs = [jordan.scalar_element(cone, v) for v in (0.4 + 0.3j, -1.0)]
                xs = [jordan.scalar_element(cone, 0.8)]
            else:
                zs = [jordan.frame_element(cone, [0.4 + 0.3j, -0.5]), jordan.frame_element(cone, [1.0, 0.2])]
                xs = [jordan.frame_element(cone, [0.8, 0.3])]
            for z in zs:
                for x in xs:
                    out.append(check_fock_genfct(cone, nu, z, x, SeriesTruncation(M), seed=opts.seed, tol=tol))
                for t in _ts(opts, (0.7,)):
                    out.append(check_fock_scalar_x(cone, nu, z, t, M, tol))
                out.append(check_fock_zero_x(cone, nu, z, M, opts.tolerance(1e-9)))
            for x in xs:
                for t in _ts(opts, (0.6, -0.4 + 0.3j)):
                    out.append(check_fock_scalar_z(cone, nu, t, x, M, tol))
            if cone.rank == 1:
                for z in zs:
                    x = xs[0]
                    lhs = fock_lhs(cone, nu, z, x, M).sum()
                    zx = complex(z.data.reshape(-1)[0]) * 0.8
                    rhs = complex(np.exp(-jordan.jtrace(z) / 2)) * complex(bessel.ibessel_rank1(nu, zx))
                    out.append(CheckReport(
                        "genfct-fock", "fock-kernel-rank1-scalar", str(cone), nu, describe({"z": z, "x": x}), M,
                        float(abs(lhs - rhs)), tol,
                    ))
    return out


def suite_fk_ex1(opts: SuiteOptions) -> list[CheckReport]:
    out = []
    M = opts.weight(40)
    for cone in _cones(opts, ("line", "realsym:2", "complexherm:2")):
        for nu in _nus(opts, (2.5, 3.0) if cone.rank == 1 else (cone.n_over_r + 1.0,)):
            if cone.rank == 1:
                for xv, yv in ((2.0, 0.2), (1.5, -0.3), (0.8, 0.5)):
                    out.append(check_fk_exercise1(
                        cone, nu, jordan.scalar_element(cone, xv), jordan.scalar_element(cone, yv),
                        SeriesTruncation(M), seed=opts.seed, tol=opts.tolerance(1e-9),
                    ))
                continue
            x = jordan.frame_element(cone, [2.0, 1.5])
            y = jordan.frame_element(cone, [0.2, -0.1])
            out.append(check_fk_exercise1(cone, nu, x, y, SeriesTruncation(M), seed=opts.seed, tol=opts.tolerance(1e-9)))
            out.append(check_fk_exercise1(
                cone, nu, x, y, SeriesTruncation(M), opts.samples(), opts.seed, tol=0.0, route="montecarlo"
            ))
    return out


def expansion_points(model: Model, cone: ConeParams, seed: int = 0) -> list[JordanElement]:
    disc = disc_grid(cone, 0.6, seed)
    if model is Model.DISC:
        return disc
    if model is Model.TUBE:
        return [models.inverse_cayley_point(w) for w in disc]
    return [w * 2.0 for w in disc]


def suite_expansions(opts: SuiteOptions) -> list[CheckReport]:
    out = []
    M = opts.weight(40)
    for cone in _cones(opts, ("line",) + RANK2_CONES):
        for nu in _nus(opts, (cone.n_over_r + 0.5, 6.0)):
            for t in _ts(opts, (0.3, 1.0)):
                for model in (Model.TUBE, Model.DISC, Model.FOCK):
                    for z in expansion_points(model, cone, opts.seed):
                        out += check_expansion(model, cone, nu, t, z, M, opts.tolerance(1e-7))
    if opts.cone is None or opts.cone.rank == 1:
        out.append(check_l2_pairing())
    return out


RECURRENCE_CONES = ("line", "realsym:2", "realsym:3", "complexherm:2", "complexherm:3", "lorentz:3", "lorentz:5")


def suite_recurrence(opts: SuiteOptions) -> list[CheckReport]:
    out = []
    M = opts.weight(10)
    for cone in _cones(opts, RECURRENCE_CONES):
        rng = check_rng(opts.seed, f"recurrence-points:{cone}")
        for nu in _nus(opts, (1.8, 2.5, 4.0)):
            for _ in range(1 if opts.quick else 2):
                x = jordan.random_cone_element(cone, rng)
                out.append(check_recurrence(cone, nu, x, M, opts.tolerance(1e-9)))
        for nu in _nus(opts, (2.5,)):
            for t in _ts(opts, (0.7,)):
                out += check_recurrence_implies_whittaker(cone, nu, t, min(M, 8), opts.tolerance(1e-10))
    return out


def kbessel_reports(tol: float = 1e-9) -> list[CheckReport]:
    out = []
    for nu in (1.5, 2.5, 4.0):
        worst = 0.0
        for x in (0.1, 1.0, 5.0):
            k = bessel.kbessel_rank1_forms(nu, x)
            ref = bessel.kbessel_rank1_classical(nu, x)
            worst = max(worst, abs(k.value - ref) / ref, abs(k.value_inverted - ref) / ref)
        out.append(CheckReport("transforms", "kbessel-integral-forms", "line", nu, "x in {0.1,1,5}", 0, worst, tol))
    return out


def suite_transforms(opts: SuiteOptions) -> list[CheckReport]:
    out = transform_reports(nodes=opts.nodes, tol=opts.tolerance(1e-6))
    out += laplace_identity_reports()
    out += cayley_reports()
    out += kbessel_reports()
    return out


def suite_jordan_axioms(opts: SuiteOptions) -> list[CheckReport]:
    out = jordan_axiom_reports(50 if opts.quick else 100, opts.seed)
    out += jack_vs_haar_reports(opts.samples(), opts.seed)
    for cone in (ConeParams.realsym(2), ConeParams.complexherm(3), ConeParams.lorentz(4)):
        rng = check_rng(opts.seed, f"exp:{cone}")
        w = jordan.random_complex_element(cone, rng)
        out.append(check_exp_expansion(cone, w * (0.8 / jordan.spectral_norm(w)), 20 if cone.rank < 3 else 16))
    return out


SUITES = {
    "genfct": suite_genfct,
    "genfct-fock": suite_genfct_fock,
    "fk-ex1": suite_fk_ex1,
    "expansions": suite_expansions,
    "recurrence": suite_recurrence,
    "transforms": suite_transforms,
    "jordan-axioms": suite_jordan_axioms,
}


def run_suite(name: str, opts: SuiteOptions | None = None) -> list[CheckReport]:
    opts = opts or SuiteOptions()
    if name == "all":
        return [rep for key in SUITES for rep in SUITES[key](opts)]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    return SUITES[name](opts)
