"""Cayley, Laplace and Segal-Bargmann transforms, with quadrature for the integral ones."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from . import bessel, jordan, laguerre, spherical
from .cone import ConeParams, Family, as_partition, gamma_omega, pochhammer
from .errors import NotInDomain, QuadratureNotConverged, UnsupportedBackend
from .jordan import JordanElement
from .models import DISC_MARGIN, delta_power

DEFAULT_NODES = 200


# -- Cayley transform ----------------------------------------------------------------

def cayley_apply(cone: ConeParams, nu: float, F, w: JordanElement) -> complex:
    """gamma_nu F(w) = Delta(e - w)^(-nu) F(i (e + w)(e - w)^(-1)) for a tube function F."""
    if jordan.spectral_norm(w) >= 1 - DISC_MARGIN:
        raise NotInDomain("Cayley transform needs a point of the bounded domain")
    e = jordan.identity(cone)
    z = 1j * jordan.jmul(e + w, jordan.jinv(e - w))
    return delta_power(e - w, -nu) * complex(F(z))


def cayley_inverse_apply(cone: ConeParams, nu: float, f, z: JordanElement) -> complex:
    """gamma_nu^{-1} f(z) = Delta((z + ie)/2i)^(-nu) f((z - ie)(z + ie)^(-1))."""
    if not jordan.in_cone(z.imag):
        raise NotInDomain("inverse Cayley transform needs a point of the tube")
    e = jordan.identity(cone)
    w = jordan.jmul(z - 1j * e, jordan.jinv(z + 1j * e))
    return delta_power((z + 1j * e) / 2j, -nu) * complex(f(w))


# -- quadrature --------------------------------------------------------------------

@lru_cache(maxsize=64)
def gauss_laguerre(alpha: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for int_0^inf u^alpha e^(-u) f(u) du."""
    x, w = special.roots_genlaguerre(nodes, alpha)
    return x, w


@dataclass(frozen=True)
class QuadratureValue:
    value: complex
    tail: float


def _weighted_integral(f, alpha: float, rate: float, nodes: int) -> QuadratureValue:
    """int_0^inf u^alpha e^(-rate u) f(u) du, with the difference to a half-size rule as tail."""
    def rule(n):
        x, w = gauss_laguerre(alpha, n)
        vals = np.asarray(f(x / rate), dtype=complex)
        return complex(np.sum(w * vals)) / rate ** (alpha + 1)

    full = rule(nodes)
    half = rule(max(nodes // 2, 1))
    return QuadratureValue(full, abs(full - half))


def laplace_rank1(nu: float, phi, z: complex, nodes: int = DEFAULT_NODES, decay: float = 1.0) -> QuadratureValue:
    """(2 / Gamma(nu)) int_0^inf e^(izu) phi(u) (2u)^(nu-1) du.

    ``phi`` must be vectorized and decay at least like exp(-decay * u); the
    product exp(izu) phi(u) is integrated against u^(nu-1) exp(-(Im z + decay) u).
    """
    if not nu > 0:
        raise ValueError("nu must be positive")
    if not z.imag > 0:
        raise NotInDomain("Laplace transform needs Im z > 0")
    rate = z.imag + decay

    def f(u):
        return np.exp(1j * z.real * u + decay * u) * phi(u)

    q = _weighted_integral(f, nu - 1, rate, nodes)
    scale = 2**nu / math.gamma(nu)
    return QuadratureValue(scale * q.value, scale * q.tail)


def segal_bargmann_rank1(nu: float, phi, z: complex, nodes: int = DEFAULT_NODES, decay: float = 1.0) -> QuadratureValue:
    """(2 / Gamma(nu)) e^(-z/2) int_0^inf I_nu(z x) e^(-x) phi(x) (2x)^(nu-1) dx.

    ``phi`` must decay at least like exp(-decay * x).
    """
    if not nu > 0:
        raise ValueError("nu must be positive")
    rate = 1 + decay

    def f(x):
        return bessel.ibessel_rank1(nu, z * x, terms=400) * np.exp(decay * x) * phi(x)

    q = _weighted_integral(f, nu - 1, rate, nodes)
    scale = 2**nu / math.gamma(nu) * complex(np.exp(-z / 2))
    return QuadratureValue(scale * q.value, abs(scale) * q.tail)


def laguerre_rank1_fn(nu: float, m: int):
    """The rank-1 Laguerre function l_m^nu as a vectorized callable."""
    def f(x):
        return laguerre.laguerre_fn_rank1(nu, m, x)[m]

    return f


def check_quadrature(q: QuadratureValue, rtol: float) -> complex:
    if q.tail > rtol * max(abs(q.value), 1e-300):
        raise QuadratureNotConverged(f"quadrature tail {q.tail:.2e} vs value {abs(q.value):.2e}")
    return q.value


# -- norms ---------------------------------------------------------------------

def l2_norm_sq_rank1(nu: float, phi, nodes: int = DEFAULT_NODES) -> float:
    """(2 / Gamma(nu)) int_0^inf |phi(u)|^2 (2u)^(nu-1) du for phi decaying like e^(-u)."""
    def f(u):
        return np.abs(np.exp(u) * phi(u)) ** 2

    q = _weighted_integral(f, nu - 1, 2.0, nodes)
    return float((2**nu / math.gamma(nu) * q.value).real)


def disc_norm_sq_rank1(nu: float, m: int, nodes: int = 64) -> float:
    """c_nu int_D |w^m|^2 (1 - |w|^2)^(nu-2) dA in polar coordinates, c_nu = (nu - 1)/pi.

    With s = |w|^2 the integral is pi int_0^1 s^m (1 - s)^(nu-2) ds, done by
    Gauss-Jacobi quadrature for the weight (1 - s)^(nu-2).
    """
    if not nu > 1:
        raise ValueError("the weighted Bergman space needs nu > 1")
    x, w = special.roots_jacobi(nodes, nu - 2, 0.0)
    s = (x + 1) / 2
    integral = float(np.sum(w * s**m)) / 2 ** (nu - 1)
    return (nu - 1) * integral


# -- Laplace transform of Laguerre polynomials ---------------------------------------

def _selberg_constant(cone: ConeParams) -> float:
    """c with int_Omega f = c int_{R_+^r} f(lambda) prod_{i<j} |l_i - l_j|^d dl for invariant f."""
    h = cone.half_d
    out = (2 * math.pi) ** ((cone.dim_n - cone.rank) / 2)
    for j in range(cone.rank):
        out *= math.gamma(1 + h) / math.gamma(1 + (j + 1) * h)
    return out


def laplace_laguerre_lhs(
    cone: ConeParams, nu: float, m, y: JordanElement, nodes: int = 60, angle_nodes: int = 48
) -> complex:
    """int_Omega e^(-(u|y)) L_m^nu(u) Delta(u)^(nu - n/r) du by quadrature.

    Rank 1: generalized Gauss-Laguerre.  Rank 2 (matrix families, diagonal y,
    experimental): eigenvalue coordinates l_2 = s, l_1 = s + q over the
    ordered chamber (the integrand is symmetric under the swap), generalized
    Gauss-Laguerre rules in s and q, and the K cap L average by the exact
    rank-2 angular rule.
    """
    m = as_partition(m, cone.rank)
    a = nu - cone.n_over_r
    if cone.rank == 1:
        yv = float(np.real(y.data).reshape(-1)[0])
        x, w = gauss_laguerre(a, nodes)
        vals = laguerre.laguerre_poly_spectral(cone, nu, m, (x / yv)[:, None])
        return complex(np.sum(w * vals)) / yv ** (a + 1)
    if cone.rank != 2 or cone.family not in (Family.REAL_SYM, Family.COMPLEX_HERM):
        raise UnsupportedBackend("radial quadrature is implemented for rank-2 matrix cones only")
    yd = np.real(np.diag(y.data))
    if not np.allclose(y.data, np.diag(yd), atol=1e-13):
        raise UnsupportedBackend("radial quadrature needs a diagonal y")
    d = cone.peirce_d
    ymin = float(yd.min())
    # (k u | y) >= ymin tr(u) = ymin (2s + q); that exponential becomes the rule weight
    xs, ws = gauss_laguerre(a, nodes)
    xq, wq = gauss_laguerre(float(d), nodes)
    s = xs / (2 * ymin)
    q = xq / ymin
    S, Q = np.meshgrid(s, q, indexing="ij")
    W = np.outer(ws / (2 * ymin) ** (a + 1), wq / ymin ** (d + 1))
    lam1, lam2 = S + Q, S
    ks, kw = jordan.rank2_kl_quadrature(cone, angle_nodes)
    # (k diag(l1, l2) k^* | diag(y1, y2)) = sum_ij |k_ij|^2 l_j y_i
    k2 = np.abs(ks) ** 2
    pair = np.einsum("kij,i->kj", k2, yd)
    expo = -(pair[:, 0, None, None] * lam1 + pair[:, 1, None, None] * lam2) + ymin * (2 * S + Q)
    avg = np.einsum("k,k...->...", kw, np.exp(expo))
    lam = np.stack([lam1.ravel(), lam2.ravel()], axis=-1)
    lpoly = laguerre.laguerre_poly_spectral(cone, nu, m, lam).reshape(S.shape)
    integrand = avg * lpoly * (S + Q) ** a
    return 2 * _selberg_constant(cone) * complex(np.sum(W * integrand))


def laplace_laguerre_rhs(cone: ConeParams, nu: float, m, y: JordanElement) -> complex:
    """Gamma_Omega(m + nu) Delta(y)^(-nu) Phi_m(e - y^(-1))."""
    m = as_partition(m, cone.rank)
    e = jordan.identity(cone)
    gam = gamma_omega(cone, nu) * pochhammer(cone, nu, m)
    return gam * complex(jordan.jdet(y)) ** (-nu) * spherical.phi_eval(cone, m, e - jordan.jinv(y))


def laplace_of_laguerre_identity(cone: ConeParams, nu: float, m, y: JordanElement, nodes: int = 60) -> float:
    """Relative residual of the Laplace transform identity for L_m^nu at y."""
    rhs = laplace_laguerre_rhs(cone, nu, m, y)
    lhs = laplace_laguerre_lhs(cone, nu, m, y, nodes)
    scale = abs(rhs) if abs(rhs) > 1e-12 else abs(gamma_omega(cone, nu) * pochhammer(cone, nu, as_partition(m, cone.rank)))
    return abs(lhs - rhs) / scale
