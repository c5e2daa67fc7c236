"""Whittaker vectors and K-type bases in the L^2, tube, bounded-domain and Fock models."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import bessel, jordan, laguerre, spherical
from .bessel import SeriesTruncation
from .cone import (
    ConeParams,
    dim_km,
    enumerate_partitions,
    in_continuous_wallach,
    pochhammer,
)
from .errors import BranchViolation, NotInCone, NotInDomain, OutsideContinuousWallach
from .jordan import JordanElement

DISC_MARGIN = 1e-9


class Model(enum.Enum):
    L2 = "l2"
    TUBE = "tube"
    DISC = "disc"
    FOCK = "fock"


@dataclass(frozen=True)
class ModelPoint:
    """An argument of a function in one of the four models, validated on construction."""

    model: Model
    point: JordanElement

    def __post_init__(self):
        check_domain(self.model, self.point)


def check_domain(model: Model, z: JordanElement) -> None:
    if model is Model.L2:
        if z.is_complex or not jordan.in_cone(z):
            raise NotInCone("L^2-model points lie in the open cone")
    elif model is Model.TUBE:
        if not jordan.in_cone(z.imag):
            raise NotInDomain("tube points need imaginary part in the cone")
    elif model is Model.DISC:
        if jordan.spectral_norm(z) >= 1 - DISC_MARGIN:
            raise NotInDomain(f"spectral norm {jordan.spectral_norm(z):.6g} is not below 1")


# -- branch policy -----------------------------------------------------------------

def delta_power(x: JordanElement, s: complex) -> complex:
    """Delta(x)^s as exp(s * sum of principal logs of the spectral values).

    Valid when no spectral value lies on the closed negative real axis; this is
    asserted rather than assumed.
    """
    lam = jordan.spectral_values(x)
    scale = max(1.0, float(np.max(np.abs(lam))))
    on_cut = (np.abs(lam.imag) <= 1e-14 * scale) & (lam.real <= 0)
    if np.any(on_cut):
        raise BranchViolation(f"spectral values {lam} meet the branch cut (-inf, 0]")
    return complex(np.exp(s * np.sum(np.log(lam.astype(complex)))))


# -- basis functions ---------------------------------------------------------------

def cayley_point(z: JordanElement) -> JordanElement:
    """(z - ie)(z + ie)^{-1}: maps the tube onto the bounded domain."""
    e = jordan.identity(z.cone)
    return jordan.jmul(z - 1j * e, jordan.jinv(z + 1j * e))


def inverse_cayley_point(w: JordanElement) -> JordanElement:
    """i(e + w)(e - w)^{-1}."""
    e = jordan.identity(w.cone)
    return 1j * jordan.jmul(e + w, jordan.jinv(e - w))


def psi_basis_many(cone: ConeParams, nu: float, partitions, z: JordanElement) -> np.ndarray:
    check_domain(Model.TUBE, z)
    e = jordan.identity(cone)
    pre = delta_power((z + 1j * e) / 2j, -nu)
    return pre * spherical.phi_eval_many(cone, partitions, cayley_point(z))


def psi_basis(cone: ConeParams, nu: float, m, z: JordanElement) -> complex:
    """Psi_m^nu(z) = Delta((z + ie)/2i)^(-nu) Phi_m((z - ie)(z + ie)^(-1))."""
    return complex(psi_basis_many(cone, nu, [m], z)[0])


# -- closed-form Whittaker vectors ---------------------------------------------------

def whittaker_tube(cone: ConeParams, nu: float, v: JordanElement, z: JordanElement) -> complex:
    """exp(i (z|v))."""
    return complex(np.exp(1j * jordan.trace_form(z, v)))


def whittaker_disc(cone: ConeParams, nu: float, v: JordanElement, w: JordanElement) -> complex:
    """Delta(e - w)^(-nu) exp(-((e + w)(e - w)^(-1) | v))."""
    check_domain(Model.DISC, w)
    e = jordan.identity(cone)
    arg = jordan.jmul(e + w, jordan.jinv(e - w))
    return delta_power(e - w, -nu) * complex(np.exp(-jordan.trace_form(arg, v)))


def whittaker_fock(
    cone: ConeParams, nu: float, v: JordanElement, z: JordanElement, trunc: SeriesTruncation | None = None
) -> complex:
    """exp(-tr(z)/2) I_nu(z, v) exp(-tr v)."""
    val = bessel.ibessel2(cone, nu, z, v, trunc)
    return complex(np.exp(-jordan.jtrace(z) / 2 - jordan.jtrace(v)) * val)


def whittaker_closed_form(model: Model, cone: ConeParams, nu: float, t: float, z, trunc=None) -> complex:
    """W_{nu, te} in the tube, disc or Fock model."""
    v = jordan.scalar_element(cone, t)
    if model is Model.TUBE:
        return whittaker_tube(cone, nu, v, z)
    if model is Model.DISC:
        return whittaker_disc(cone, nu, v, z)
    if model is Model.FOCK:
        return whittaker_fock(cone, nu, v, z, trunc)
    raise ValueError("the L^2-model Whittaker vector is a point evaluation, not a function")


# -- K-type expansions ------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientRow:
    partition: tuple[int, ...]
    coefficient: float


def _ell_te(cone: ConeParams, nu: float, parts, t: float) -> np.ndarray:
    vals = laguerre.laguerre_fn_many(cone, nu, parts, jordan.scalar_element(cone, t))
    return vals.real


def expansion_coefficients(model: Model, cone: ConeParams, nu: float, t: float, max_weight: int) -> list[CoefficientRow]:
    """Coefficients of the K-type expansion of W_{nu, te} in ``model``, weight <= max_weight.

    L2:   d_m l_m(te) / ((n/r)_m (nu)_m)         against l_m
    tube: d_m l_m(te) / (n/r)_m                  against Psi_m
    disc: d_m l_m(te) / (n/r)_m                  against Phi_m
    Fock: (-1)^|m| d_m l_m(te) / (2^|m| (n/r)_m (nu)_m)  against Phi_m
    """
    if not in_continuous_wallach(cone, nu):
        raise OutsideContinuousWallach(f"nu={nu} is not in the continuous Wallach range")
    parts = enumerate_partitions(cone.rank, max_weight)
    ell = _ell_te(cone, nu, parts, t)
    rows = []
    for m, lv in zip(parts, ell):
        c = dim_km(cone, m) * lv / pochhammer(cone, cone.n_over_r, m)
        if model in (Model.L2, Model.FOCK):
            c /= pochhammer(cone, nu, m)
        if model is Model.FOCK:
            c *= (-0.5) ** sum(m)
        rows.append(CoefficientRow(m, c))
    return rows


def basis_values(model: Model, cone: ConeParams, nu: float, parts, z: JordanElement) -> np.ndarray:
    if model is Model.L2:
        return laguerre.laguerre_fn_many(cone, nu, parts, z)
    if model is Model.TUBE:
        return psi_basis_many(cone, nu, parts, z)
    if model is Model.DISC:
        check_domain(Model.DISC, z)
    return spherical.phi_eval_many(cone, parts, z)


@dataclass(frozen=True)
class PartialSums:
    """Partial sums of an expansion, one per completed weight shell."""

    shells: np.ndarray

    @property
    def value(self) -> complex:
        return complex(self.shells.sum())

    def upto(self, weight: int) -> complex:
        return complex(self.shells[: weight + 1].sum())


def expansion_partial_sums(
    model: Model, cone: ConeParams, nu: float, t: float, z: JordanElement, max_weight: int
) -> PartialSums:
    rows = expansion_coefficients(model, cone, nu, t, max_weight)
    parts = [row.partition for row in rows]
    coef = np.array([row.coefficient for row in rows])
    vals = basis_values(model, cone, nu, parts, z)
    weights = np.array([sum(m) for m in parts])
    terms = coef * vals
    shells = np.array([terms[weights == k].sum() for k in range(max_weight + 1)])
    return PartialSums(shells)


def expansion_partial(
    model: Model, cone: ConeParams, nu: float, t: float, z: JordanElement, trunc: SeriesTruncation | None = None
) -> complex:
    """Truncated K-type expansion of W_{nu, te} at ``z`` (weights <= trunc.max_weight)."""
    if not t > 0:
        raise ValueError("expansions are stated for t > 0")
    trunc = trunc or SeriesTruncation()
    return expansion_partial_sums(model, cone, nu, t, z, trunc.max_weight).value


def whittaker_multiplier_residual(
    cone: ConeParams, nu: float, t: float, x: JordanElement, trunc: SeriesTruncation | None = None
) -> float:
    """|tr(x) S_M(x) - r t S_M(x)| for the L^2-model partial sum S_M."""
    check_domain(Model.L2, x)
    s = expansion_partial(Model.L2, cone, nu, t, x, trunc)
    return float(abs((jordan.jtrace(x).real - cone.rank * t) * s))
