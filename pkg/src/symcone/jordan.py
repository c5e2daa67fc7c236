"""Concrete Euclidean Jordan algebras and their complexifications.

Two payload layouts cover the four supported families:

* matrix families (real line, real symmetric, complex Hermitian) store an
  ``(..., r, r)`` array; the real line is the ``1 x 1`` case.  The Jordan
  product is the symmetrized matrix product.
* the Lorentz (spin factor) family stores an ``(..., n)`` vector
  ``(x0, xbar)`` with ``x o y = (x0 y0 + xbar.ybar, x0 ybar + y0 xbar)``.

The ``payload_*`` functions act on raw arrays and broadcast over leading
batch axes; :class:`JordanElement` wraps a single payload together with its
cone.  Complexified elements use the same class with a complex payload:
complex symmetric matrices, arbitrary complex matrices (complexified
Hermitian), or complex vectors.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cone import ConeParams, Family
from .errors import BackendMismatch, NotInClosedCone, NotInCone, SingularElement

CONE_TOL = 1e-10


def is_matrix_family(cone: ConeParams) -> bool:
    return cone.family is not Family.LORENTZ


def payload_shape(cone: ConeParams) -> tuple[int, ...]:
    if is_matrix_family(cone):
        return (cone.rank, cone.rank)
    return (cone.dim_n,)


# -- payload level --------------------------------------------------------------

def payload_identity(cone: ConeParams) -> np.ndarray:
    if is_matrix_family(cone):
        return np.eye(cone.rank)
    e = np.zeros(cone.dim_n)
    e[0] = 1.0
    return e


def payload_mul(cone: ConeParams, a, b):
    if is_matrix_family(cone):
        return 0.5 * (a @ b + b @ a)
    a0, ab = a[..., :1], a[..., 1:]
    b0, bb = b[..., :1], b[..., 1:]
    head = a0 * b0 + np.sum(ab * bb, axis=-1, keepdims=True)
    return np.concatenate([head, a0 * bb + b0 * ab], axis=-1)


def payload_trace(cone: ConeParams, a):
    if is_matrix_family(cone):
        return np.trace(a, axis1=-2, axis2=-1)
    return 2.0 * a[..., 0]


def payload_trace_form(cone: ConeParams, a, b):
    """Bilinear form (a|b) = tr(a o b); no complex conjugation."""
    if is_matrix_family(cone):
        # tr(ab) = sum_ij a_ij b_ji
        return np.einsum("...ij,...ji->...", a, b)
    return 2.0 * np.sum(a * b, axis=-1)


def payload_det(cone: ConeParams, a):
    if is_matrix_family(cone):
        return np.linalg.det(a)
    return a[..., 0] ** 2 - np.sum(a[..., 1:] ** 2, axis=-1)


def payload_inv(cone: ConeParams, a):
    if is_matrix_family(cone):
        return np.linalg.inv(a)
    det = payload_det(cone, a)
    out = np.concatenate([a[..., :1], -a[..., 1:]], axis=-1)
    return out / np.asarray(det)[..., None]


def payload_conj(cone: ConeParams, a):
    """The conjugation of V_C fixing V."""
    if cone.family is Family.COMPLEX_HERM:
        return np.conj(np.swapaxes(a, -1, -2))
    return np.conj(a)


def payload_quad(cone: ConeParams, a, z):
    """P(a) z = 2 a o (a o z) - a^2 o z."""
    if is_matrix_family(cone):
        return a @ z @ a
    return 2 * payload_mul(cone, a, payload_mul(cone, a, z)) - payload_mul(
        cone, payload_mul(cone, a, a), z
    )


def payload_power_sums(cone: ConeParams, a, kmax: int):
    """tr(a^k) for k = 1..kmax, stacked on a new last axis."""
    sums = []
    p = a
    for k in range(1, kmax + 1):
        if k > 1:
            p = payload_mul(cone, p, a)
        sums.append(payload_trace(cone, p))
    return np.stack(sums, axis=-1)


def elementary_from_power_sums(p, r: int):
    """Newton's identities: e_1..e_r from p_1..p_r (last axis)."""
    e = [np.ones(p.shape[:-1], dtype=p.dtype)]
    for k in range(1, r + 1):
        acc = 0
        for i in range(1, k + 1):
            acc = acc + (-1) ** (i - 1) * e[k - i] * p[..., i - 1]
        e.append(acc / k)
    return np.stack(e[1:], axis=-1)


def roots_from_elementary(e):
    """Roots of t^r - e1 t^(r-1) + e2 t^(r-2) - ... (batched over leading axes)."""
    r = e.shape[-1]
    e = np.asarray(e, dtype=complex)
    if r == 1:
        return e.copy()
    if r == 2:
        s, p = e[..., 0], e[..., 1]
        disc = np.sqrt(s * s - 4 * p)
        # pick the sign avoiding cancellation, then recover the other root from the product
        sgn = np.where((np.conj(s) * disc).real >= 0, 1.0, -1.0)
        big = 0.5 * (s + sgn * disc)
        small = np.where(big != 0, p / np.where(big != 0, big, 1), 0.0)
        return np.stack([big, small], axis=-1)
    comp = np.zeros(e.shape[:-1] + (r, r), dtype=complex)
    for k in range(r):
        comp[..., 0, k] = (-1) ** k * e[..., k]
    for k in range(1, r):
        comp[..., k, k - 1] = 1.0
    return np.linalg.eigvals(comp)


def payload_spectral_values(cone: ConeParams, a):
    """Spectral values of a (complexified) element from its power sums.

    The values are the roots of the characteristic polynomial whose
    coefficients follow from tr(a^k), k <= r, by Newton's identities, so
    non-diagonalizable complex elements are handled uniformly.
    """
    if cone.rank == 1:
        return np.asarray(payload_trace(cone, a), dtype=complex)[..., None]
    p = payload_power_sums(cone, np.asarray(a, dtype=complex), cone.rank)
    return roots_from_elementary(elementary_from_power_sums(p, cone.rank))


def payload_real_eigh(cone: ConeParams, a):
    """Eigenvalues (ascending) and a reconstruction frame of a real element.

    Returns ``(vals, frame)`` where ``frame`` is a list of r payloads of
    primitive idempotents with ``a = sum vals[k] frame[k]``.
    """
    if is_matrix_family(cone):
        vals, vecs = np.linalg.eigh(a)
        frame = [np.outer(vecs[:, k], np.conj(vecs[:, k])) for k in range(cone.rank)]
        if cone.family is not Family.COMPLEX_HERM:
            frame = [f.real for f in frame]
        return vals, frame
    x0 = a[0].real
    xb = a[1:].real
    nrm = float(np.linalg.norm(xb))
    if nrm > 0:
        u = xb / nrm
    else:
        u = np.zeros_like(xb)
        u[0] = 1.0
    c_plus = 0.5 * np.concatenate([[1.0], u])
    c_minus = 0.5 * np.concatenate([[1.0], -u])
    return np.array([x0 - nrm, x0 + nrm]), [c_minus, c_plus]


# -- orthonormal basis of V --------------------------------------------------

@lru_cache(maxsize=None)
def basis(cone: ConeParams) -> tuple[np.ndarray, ...]:
    """Fixed orthonormal basis of V for the trace form.

    Matrix families: diagonal units, then (E_ij + E_ji)/sqrt2 for i<j, then
    (for complex Hermitian) i(E_ij - E_ji)/sqrt2.  Lorentz: standard
    coordinates scaled by 1/sqrt2.
    """
    out = []
    if is_matrix_family(cone):
        r = cone.rank
        dtype = complex if cone.family is Family.COMPLEX_HERM else float
        for i in range(r):
            b = np.zeros((r, r), dtype=dtype)
            b[i, i] = 1
            out.append(b)
        s = 1 / np.sqrt(2)
        for i in range(r):
            for j in range(i + 1, r):
                b = np.zeros((r, r), dtype=dtype)
                b[i, j] = b[j, i] = s
                out.append(b)
        if cone.family is Family.COMPLEX_HERM:
            for i in range(r):
                for j in range(i + 1, r):
                    b = np.zeros((r, r), dtype=complex)
                    b[i, j] = 1j * s
                    b[j, i] = -1j * s
                    out.append(b)
    else:
        for k in range(cone.dim_n):
            b = np.zeros(cone.dim_n)
            b[k] = 1 / np.sqrt(2)
            out.append(b)
    assert len(out) == cone.dim_n
    return tuple(out)


# -- element wrapper ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class JordanElement:
    """An element of V or of its complexification V_C."""

    cone: ConeParams
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.shape != payload_shape(self.cone):
            raise ValueError(f"payload shape {data.shape} does not fit {self.cone}")
        object.__setattr__(self, "data", data)

    def _check(self, other):
        if not isinstance(other, JordanElement) or other.cone != self.cone:
            raise BackendMismatch(f"cannot combine {self.cone} with {getattr(other, 'cone', other)}")

    def __add__(self, other):
        if np.isscalar(other):
            return JordanElement(self.cone, self.data + other * payload_identity(self.cone))
        self._check(other)
        return JordanElement(self.cone, self.data + other.data)

    __radd__ = __add__

    def __sub__(self, other):
        if np.isscalar(other):
            return JordanElement(self.cone, self.data - other * payload_identity(self.cone))
        self._check(other)
        return JordanElement(self.cone, self.data - other.data)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return JordanElement(self.cone, -self.data)

    def __mul__(self, scalar):
        if isinstance(scalar, JordanElement):
            raise TypeError("use jmul for the Jordan product")
        return JordanElement(self.cone, self.data * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return JordanElement(self.cone, self.data / scalar)

    @property
    def is_complex(self) -> bool:
        """True for elements of V_C that do not lie in V."""
        if self.cone.family is Family.COMPLEX_HERM:
            return not np.allclose(self.data, np.conj(self.data.T), atol=1e-13)
        return bool(np.iscomplexobj(self.data) and np.any(self.data.imag != 0))

    def conj(self) -> JordanElement:
        return JordanElement(self.cone, payload_conj(self.cone, self.data))

    @property
    def real(self) -> JordanElement:
        d = 0.5 * (self.data + payload_conj(self.cone, self.data))
        if self.cone.family is not Family.COMPLEX_HERM:
            d = d.real
        return JordanElement(self.cone, d)

    @property
    def imag(self) -> JordanElement:
        d = (self.data - payload_conj(self.cone, self.data)) / 2j
        if self.cone.family is not Family.COMPLEX_HERM:
            d = d.real
        return JordanElement(self.cone, d)

    def coords(self) -> np.ndarray:
        """Coordinates in the fixed orthonormal basis (complex for V_C)."""
        c = np.array([payload_trace_form(self.cone, self.data, b) for b in basis(self.cone)])
        return c if self.is_complex else c.real

    def __repr__(self):
        return f"JordanElement({self.cone}, {self.data.tolist()!r})"


def identity(cone: ConeParams) -> JordanElement:
    return JordanElement(cone, payload_identity(cone))


def from_coords(cone: ConeParams, coords) -> JordanElement:
    coords = np.asarray(coords)
    data = sum(c * b for c, b in zip(coords, basis(cone)))
    if cone.family is not Family.COMPLEX_HERM and not np.iscomplexobj(coords):
        data = np.real(data)
    return JordanElement(cone, data)


def frame_element(cone: ConeParams, values) -> JordanElement:
    """sum_k values[k] c_k for the standard Jordan frame ("diagonal" element)."""
    values = np.asarray(values)
    if len(values) != cone.rank:
        raise ValueError(f"need {cone.rank} values, got {len(values)}")
    if is_matrix_family(cone):
        dtype = complex if (np.iscomplexobj(values) or cone.family is Family.COMPLEX_HERM) else float
        return JordanElement(cone, np.diag(values).astype(dtype))
    data = np.zeros(cone.dim_n, dtype=values.dtype if np.iscomplexobj(values) else float)
    data[0] = 0.5 * (values[0] + values[1])
    data[1] = 0.5 * (values[0] - values[1])
    return JordanElement(cone, data)


def scalar_element(cone: ConeParams, t) -> JordanElement:
    """t e."""
    return identity(cone) * t


def _same(x: JordanElement, y: JordanElement):
    if x.cone != y.cone:
        raise BackendMismatch(f"{x.cone} vs {y.cone}")


def jmul(x: JordanElement, y: JordanElement) -> JordanElement:
    _same(x, y)
    return JordanElement(x.cone, payload_mul(x.cone, x.data, y.data))


def jtrace(x: JordanElement):
    return payload_trace(x.cone, x.data)[()]


def trace_form(x: JordanElement, y: JordanElement):
    _same(x, y)
    return payload_trace_form(x.cone, x.data, y.data)[()]


def jdet(x: JordanElement):
    return payload_det(x.cone, x.data)[()]


def jinv(x: JordanElement) -> JordanElement:
    scale = max(1.0, float(np.max(np.abs(x.data))))
    det = jdet(x)
    if abs(det) <= 1e-12 * scale ** x.cone.rank:
        raise SingularElement(f"Delta(x)={det} is numerically zero")
    return JordanElement(x.cone, payload_inv(x.cone, x.data))


def jpow(x: JordanElement, k: int) -> JordanElement:
    out = identity(x.cone)
    for _ in range(k):
        out = jmul(out, x)
    return out


def power_sums(x: JordanElement, kmax: int) -> np.ndarray:
    if kmax < 1:
        raise ValueError("kmax >= 1 required")
    return payload_power_sums(x.cone, x.data, kmax)


def spectral_values(x: JordanElement) -> np.ndarray:
    return payload_spectral_values(x.cone, x.data)


def mult_operator(x: JordanElement) -> np.ndarray:
    """Matrix of L(x) in the fixed orthonormal basis."""
    cols = [JordanElement(x.cone, payload_mul(x.cone, x.data, b)).coords() for b in basis(x.cone)]
    return np.array(cols).T


def quad_rep(x: JordanElement) -> np.ndarray:
    """Matrix of P(x) = 2 L(x)^2 - L(x^2) in the fixed orthonormal basis."""
    lx = mult_operator(x)
    return 2 * lx @ lx - mult_operator(jmul(x, x))


def quad_apply(a: JordanElement, z: JordanElement) -> JordanElement:
    _same(a, z)
    return JordanElement(a.cone, payload_quad(a.cone, a.data, z.data))


def min_eigenvalue(x: JordanElement) -> float:
    vals, _ = payload_real_eigh(x.cone, x.real.data)
    return float(np.min(vals))


def in_cone(x: JordanElement) -> bool:
    norm = float(np.linalg.norm(x.data))
    return min_eigenvalue(x) > CONE_TOL * (1 + norm)


def in_closed_cone(x: JordanElement, tol: float = 1e-10) -> bool:
    return min_eigenvalue(x) >= -tol


def real_function(x: JordanElement, f) -> JordanElement:
    """Apply a scalar function through the spectral decomposition of a real element."""
    vals, frame = payload_real_eigh(x.cone, x.data)
    data = sum(f(v) * c for v, c in zip(vals, frame))
    return JordanElement(x.cone, np.asarray(data))


def sqrt_omega(x: JordanElement) -> JordanElement:
    if not in_cone(x):
        raise NotInCone("square root needs an element of the open cone")
    return real_function(x, np.sqrt)


def sqrt_closed(x: JordanElement) -> JordanElement:
    """Square root on the closed cone; tiny negative eigenvalues are clipped to 0."""
    if not in_closed_cone(x):
        raise NotInClosedCone("element has a negative eigenvalue")
    return real_function(x, lambda v: np.sqrt(max(v, 0.0)))


def spectral_norm(z: JordanElement) -> float:
    """Spectral norm on V_C (the bounded domain D is its open unit ball)."""
    if is_matrix_family(z.cone):
        return float(np.linalg.norm(z.data, ord=2))
    # rank 2: s1^2 + s2^2 = (z|conj z) and s1 s2 = |Delta(z)|
    s = float(payload_trace_form(z.cone, z.data, np.conj(z.data)).real)
    p = float(abs(payload_det(z.cone, z.data)))
    return float(np.sqrt(0.5 * (s + np.sqrt(max(s * s - 4 * p * p, 0.0)))))


# -- the compact group K cap L ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class KLRotation:
    """An automorphism of V: orthogonal/unitary conjugation, or a spatial rotation."""

    cone: ConeParams
    matrix: np.ndarray

    def apply(self, x: JordanElement) -> JordanElement:
        return JordanElement(x.cone, kl_act(x.cone, self.matrix, x.data))

    def inverse(self) -> KLRotation:
        return KLRotation(self.cone, np.conj(self.matrix.T))


def kl_act(cone: ConeParams, k, a):
    """Action of (a batch of) K cap L elements on a payload."""
    if is_matrix_family(cone):
        return k @ a @ np.conj(np.swapaxes(k, -1, -2))
    spatial = np.einsum("...ij,...j->...i", k, a[..., 1:])
    head = np.broadcast_to(a[..., :1], spatial.shape[:-1] + (1,))
    return np.concatenate([head, spatial], axis=-1)


def _haar_qr(rng, count: int, dim: int, complex_: bool):
    g = rng.standard_normal((count, dim, dim))
    if complex_:
        g = (g + 1j * rng.standard_normal((count, dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phase = diag / np.abs(diag)
    return q * phase[..., None, :]


def haar_kl_batch(cone: ConeParams, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` Haar-distributed elements of K cap L as a stacked matrix array."""
    if cone.family is Family.REAL_LINE or (is_matrix_family(cone) and cone.rank == 1):
        return np.ones((count, 1, 1))
    if cone.family is Family.REAL_SYM:
        return _haar_qr(rng, count, cone.rank, False)
    if cone.family is Family.COMPLEX_HERM:
        return _haar_qr(rng, count, cone.rank, True)
    return _haar_qr(rng, count, cone.dim_n - 1, False)


def haar_kl_sample(cone: ConeParams, rng_seed) -> KLRotation:
    rng = np.random.default_rng(rng_seed)
    return KLRotation(cone, haar_kl_batch(cone, 1, rng)[0])


def rank2_kl_quadrature(cone: ConeParams, nodes: int = 64):
    """Rotations and weights integrating exactly over K cap L for rank 2.

    Valid for integrands f(k) that depend only on the relative position of
    k x and a second element, where both elements are frame-diagonal: such
    integrands are functions of s = cos(angle) between the spatial parts,
    distributed with density proportional to (1 - s^2)^((d-2)/2).  Returns
    ``(ks, weights)`` with ``ks`` stacked K cap L elements.
    """
    from scipy.special import roots_jacobi

    if cone.rank != 2:
        raise ValueError("rank-2 quadrature only")
    a = (cone.peirce_d - 2) / 2
    s, w = roots_jacobi(nodes, a, a)
    w = w / w.sum()
    theta = np.arccos(np.clip(s, -1, 1))
    if is_matrix_family(cone):
        # conjugating diag(l1, l2) by a rotation of angle phi moves the spatial
        # direction by 2 phi in the spin-factor picture
        phi = theta / 2
        c, sn = np.cos(phi), np.sin(phi)
        ks = np.zeros((nodes, 2, 2), dtype=complex if cone.family is Family.COMPLEX_HERM else float)
        ks[:, 0, 0] = c
        ks[:, 0, 1] = -sn
        ks[:, 1, 0] = sn
        ks[:, 1, 1] = c
    else:
        m = cone.dim_n - 1
        ks = np.tile(np.eye(m), (nodes, 1, 1))
        c, sn = np.cos(theta), np.sin(theta)
        ks[:, 0, 0] = c
        ks[:, 1, 1] = c
        ks[:, 0, 1] = -sn
        ks[:, 1, 0] = sn
    return ks, w


# -- random elements for tests and checks --------------------------------------------

def random_element(cone: ConeParams, rng: np.random.Generator, scale: float = 1.0) -> JordanElement:
    return from_coords(cone, scale * rng.standard_normal(cone.dim_n))


def random_complex_element(cone: ConeParams, rng: np.random.Generator, scale: float = 1.0) -> JordanElement:
    c = rng.standard_normal(cone.dim_n) + 1j * rng.standard_normal(cone.dim_n)
    return from_coords(cone, scale * c / np.sqrt(2))


def random_cone_element(
    cone: ConeParams, rng: np.random.Generator, low: float = 0.2, high: float = 2.0
) -> JordanElement:
    """k diag(eigs) with eigenvalues uniform in [low, high] and k Haar."""
    eigs = rng.uniform(low, high, size=cone.rank)
    k = haar_kl_batch(cone, 1, rng)[0]
    base = frame_element(cone, eigs)
    return JordanElement(cone, kl_act(cone, k, base.data))
