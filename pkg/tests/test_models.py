import cmath
import math

import numpy as np
import pytest

from symcone.bessel import ibessel, ibessel_rank1_classical
from symcone.cone import ConeParams, dim_km, enumerate_partitions, pochhammer
from symcone.errors import NotInCone, NotInDomain
from symcone.jordan import (
    JordanElement,
    identity,
    jtrace,
    random_complex_element,
    random_cone_element,
    random_element,
    scalar_element,
    spectral_norm,
    trace_form,
)
from symcone.laguerre import laguerre_fn
from symcone.models import (
    Model,
    ModelPoint,
    expansion_coefficients,
    expansion_partial,
    expansion_partial_sums,
    inverse_cayley_point,
    psi_basis,
    psi_basis_many,
    whittaker_closed_form,
    whittaker_disc,
    whittaker_fock,
    whittaker_multiplier_residual,
    whittaker_tube,
)
from symcone.bessel import SeriesTruncation
from symcone.transforms import cayley_apply

from .conftest import ALL_CONES

LINE = ConeParams.line()
RANK_LE_2 = [c for c in ALL_CONES if c.rank <= 2]


def scalar(x):
    return JordanElement(LINE, np.array([[x]], dtype=complex))


def disc_point(cone, rng, norm=0.5):
    w = random_complex_element(cone, rng)
    return w * (norm / spectral_norm(w))


def tube_point(cone, rng):
    return random_element(cone, rng) + 1j * random_cone_element(cone, rng)


@pytest.mark.parametrize("cone", ALL_CONES, ids=str)
def test_psi_at_ie(cone):
    ie = 1j * identity(cone)
    parts = enumerate_partitions(cone.rank, 4)
    vals = psi_basis_many(cone, 2.3 + cone.n_over_r, parts, ie)
    assert vals[0] == pytest.approx(1.0)
    np.testing.assert_allclose(vals[1:], 0, atol=1e-14)


def test_psi_rank1_by_hand():
    for m in range(6):
        assert psi_basis(LINE, 2.0, (m,), scalar(2j)) == pytest.approx((2 / 3) ** 2 * (1 / 3) ** m, rel=1e-13)


@pytest.mark.parametrize("cone", ALL_CONES, ids=str)
def test_tube_whittaker(cone, rng):
    t = 0.7
    v = scalar_element(cone, t)
    assert whittaker_tube(cone, 1.0, v, 1j * identity(cone)) == pytest.approx(math.exp(-cone.rank * t))
    z = tube_point(cone, rng)
    for _ in range(5):
        u = random_element(cone, rng)
        shifted = whittaker_tube(cone, 1.0, v, z + u)
        expect = cmath.exp(1j * trace_form(u, v)) * whittaker_tube(cone, 1.0, v, z)
        assert abs(shifted - expect) <= 1e-13 * abs(expect)
    v = random_cone_element(cone, rng)
    x, y = random_element(cone, rng), random_cone_element(cone, rng)
    assert abs(whittaker_tube(cone, 1.0, v, x + 1j * y)) == pytest.approx(math.exp(-trace_form(y, v).real), rel=1e-12)


@pytest.mark.parametrize("cone", ALL_CONES, ids=str)
def test_disc_whittaker(cone, rng):
    v = random_cone_element(cone, rng)
    nu = cone.n_over_r + 0.5
    zero = scalar_element(cone, 0.0)
    assert whittaker_disc(cone, nu, v, zero) == pytest.approx(math.exp(-jtrace(v).real))
    for _ in range(5):
        w = disc_point(cone, rng)
        via_cayley = cayley_apply(cone, nu, lambda z: whittaker_tube(cone, nu, v, z), w)
        direct = whittaker_disc(cone, nu, v, w)
        assert abs(via_cayley - direct) <= 1e-12 * max(1, abs(direct))
    with pytest.raises(NotInDomain):
        whittaker_disc(cone, nu, v, scalar_element(cone, 1.0))


def test_disc_whittaker_rank1_by_hand():
    t = 0.4
    assert whittaker_disc(LINE, 1.0, scalar(t).real, scalar(0.5)) == pytest.approx(2 * math.exp(-3 * t))


@pytest.mark.parametrize("cone", RANK_LE_2, ids=str)
def test_fock_whittaker(cone, rng):
    nu = cone.n_over_r + 0.5
    t = 0.6
    v = scalar_element(cone, t)
    zero = scalar_element(cone, 0.0)
    w = random_cone_element(cone, rng)
    assert whittaker_fock(cone, nu, w, zero) == pytest.approx(math.exp(-jtrace(w).real))
    assert whittaker_fock(cone, nu, v, zero) == pytest.approx(math.exp(-cone.rank * t))
    z = random_complex_element(cone, rng)
    expect = cmath.exp(-cone.rank * t - jtrace(z) / 2) * ibessel(cone, nu, z * t)
    assert abs(whittaker_fock(cone, nu, v, z) - expect) <= 1e-12 * abs(expect)


def test_fock_whittaker_rank1_classical():
    nu, t = 2.5, 0.8
    for z in [0.3, 1.7, 4.0]:
        expect = math.exp(-z / 2 - t) * ibessel_rank1_classical(nu, z * t)
        got = whittaker_fock(LINE, nu, scalar(t).real, scalar(z))
        assert got == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("cone", ALL_CONES, ids=str)
def test_expansion_trivial_points(cone):
    nu, t = cone.n_over_r + 0.5, 0.4
    zero = scalar_element(cone, 0.0)
    weight = 6 if cone.rank < 3 else 4
    assert expansion_partial(Model.DISC, cone, nu, t, zero, SeriesTruncation(weight)) == pytest.approx(
        math.exp(-cone.rank * t), abs=1e-14)
    assert expansion_partial(Model.TUBE, cone, nu, t, 1j * identity(cone), SeriesTruncation(weight)) == pytest.approx(
        math.exp(-cone.rank * t), abs=1e-14)


def test_expansion_rank1_disc_closed_form():
    nu, t, w = 2.0, 0.3, 0.4
    expect = (1 - w) ** (-nu) * math.exp(-t * (1 + w) / (1 - w))
    got = expansion_partial(Model.DISC, LINE, nu, t, scalar(w), SeriesTruncation(60))
    assert abs(got - expect) <= 1e-9


def test_expansion_rank1_tube():
    nu, t, z = 3.0, 0.5, 1 + 2j
    got = expansion_partial(Model.TUBE, LINE, nu, t, scalar(z), SeriesTruncation(60))
    assert abs(got - cmath.exp(1j * z * t)) <= 1e-8


@pytest.mark.parametrize("cone", RANK_LE_2, ids=str)
def test_expansion_converges_inside(cone, rng):
    # well inside the safe box the three closed forms are reproduced to 1e-7
    nu, t = cone.n_over_r + 0.5, 0.5
    w = disc_point(cone, rng, 0.3)
    for model, point in [(Model.DISC, w), (Model.TUBE, inverse_cayley_point(w)), (Model.FOCK, 2 * w)]:
        sums = expansion_partial_sums(model, cone, nu, t, point, 40)
        closed = whittaker_closed_form(model, cone, nu, t, point)
        assert abs(sums.value - closed) <= 1e-7 * max(1, abs(closed))


@pytest.mark.parametrize("cone", ALL_CONES, ids=str)
def test_coefficient_rows(cone):
    nu, t = cone.n_over_r + 0.5, 0.7
    parts = enumerate_partitions(cone.rank, 3)
    rows = {model: expansion_coefficients(model, cone, nu, t, 3) for model in Model}
    x = scalar_element(cone, t)
    for i, m in enumerate(parts):
        ell = laguerre_fn(cone, nu, m, x)
        base = dim_km(cone, m) * ell / pochhammer(cone, cone.n_over_r, m)
        assert rows[Model.DISC][i].coefficient == pytest.approx(base)
        assert rows[Model.TUBE][i].coefficient == pytest.approx(base)
        assert rows[Model.L2][i].coefficient == pytest.approx(base / pochhammer(cone, nu, m))
        assert rows[Model.FOCK][i].coefficient == pytest.approx((-0.5) ** sum(m) * base / pochhammer(cone, nu, m))


def test_multiplier_residual():
    nu, t = 2.0, 0.8
    x = 0.5
    # a single term: coefficient l_0(t) times l_0(x)
    res0 = whittaker_multiplier_residual(LINE, nu, t, scalar(x).real, SeriesTruncation(0))
    assert res0 == pytest.approx(abs(x - t) * math.exp(-t) * math.exp(-x), rel=1e-13)
    at_t = whittaker_multiplier_residual(LINE, nu, t, scalar(t).real, SeriesTruncation(40))
    assert at_t <= 1e-12 * (1 + abs(expansion_partial(Model.L2, LINE, nu, t, scalar(t).real, SeriesTruncation(40))))


def test_domain_checks():
    c = ConeParams.realsym(2)
    with pytest.raises(NotInCone):
        ModelPoint(Model.L2, scalar_element(c, -1.0))
    with pytest.raises(NotInDomain):
        ModelPoint(Model.TUBE, scalar_element(c, 1.0) + 0j)
    with pytest.raises(NotInDomain):
        ModelPoint(Model.DISC, scalar_element(c, 1.2) + 0j)
    ModelPoint(Model.FOCK, scalar_element(c, 100.0) + 0j)
