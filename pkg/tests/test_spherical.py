import itertools
import math

import numpy as np
import pytest
from scipy import special

from symcone.cone import ConeParams, dim_km, dominates, enumerate_partitions, pochhammer
from symcone.errors import NotInClosedCone, UnsupportedBackend, WeightLimitExceeded
from symcone.jordan import (
    frame_element,
    haar_kl_sample,
    identity,
    jdet,
    jtrace,
    random_complex_element,
    random_cone_element,
    random_element,
    scalar_element,
    spectral_values,
)
from symcone.spherical import (
    JackCache,
    jack_coeffs,
    phi_eval,
    phi_eval2,
    phi_eval_many,
    raised_weight_limit,
    spherical_via_haar,
)

from .conftest import ALL_CONES


def schur_normalized(lam, m):
    """Schur polynomial by the bialternant formula, divided by its value at (1,...,1)."""
    r = len(m)
    lam = np.asarray(lam, dtype=complex)
    num = np.linalg.det(np.array([[x ** (m[j] + r - 1 - j) for j in range(r)] for x in lam]))
    den = np.linalg.det(np.array([[x ** (r - 1 - j) for j in range(r)] for x in lam]))
    at_one = 1.0
    for i in range(r):
        for j in range(i + 1, r):
            at_one *= (m[i] - m[j] + j - i) / (j - i)
    return num / den / at_one


def one_row_jack(lam, k, half_d):
    """Sum over compositions of prod (d/2)_a / a! * lam^a, from the Jack generating function."""
    r = len(lam)
    total = 0.0
    for a in itertools.product(range(k + 1), repeat=r):
        if sum(a) != k:
            continue
        term = 1.0
        for ai, x in zip(a, lam):
            term *= special.poch(half_d, ai) / math.factorial(ai) * x**ai
        total += term
    return total


def one_row_at_one(k, r, half_d):
    return special.poch(r * half_d, k) / math.factorial(k)


def rank2_oracle(lam, m, half_d):
    m1, m2 = m
    k = m1 - m2
    return (lam[0] * lam[1]) ** m2 * one_row_jack(lam, k, half_d) / one_row_at_one(k, 2, half_d)


@pytest.mark.parametrize("cone", ALL_CONES, ids=str)
def test_normalization_and_homogeneity(cone):
    e = identity(cone)
    parts = enumerate_partitions(cone.rank, 10)
    np.testing.assert_allclose(phi_eval_many(cone, parts, e), 1.0, atol=1e-12)
    vals = phi_eval_many(cone, parts, scalar_element(cone, 1.3))
    np.testing.assert_allclose(vals, [1.3 ** sum(m) for m in parts], rtol=1e-12)


@pytest.mark.parametrize("cone", ALL_CONES, ids=str)
def test_low_degree(cone, rng):
    r = cone.rank
    assert phi_eval(cone, (0,) * r, random_element(cone, rng)) == 1
    c1 = jack_coeffs(cone, (1,) + (0,) * (r - 1))
    assert c1.coeffs[(1,) + (0,) * (r - 1)] == pytest.approx(1 / r)
    x = random_element(cone, rng)
    assert phi_eval(cone, (1,) + (0,) * (r - 1), x) == pytest.approx(jtrace(x) / r)
    assert phi_eval(cone, (1,) * r, x) == pytest.approx(jdet(x), rel=1e-12)


@pytest.mark.parametrize("cone", ALL_CONES, ids=str)
def test_triangularity(cone):
    for m in enumerate_partitions(cone.rank, 8):
        c = jack_coeffs(cone, m)
        assert c.leading() != 0
        for mu, v in c.coeffs.items():
            if v != 0:
                assert dominates(m, mu)


@pytest.mark.parametrize("cone", [ConeParams.complexherm(2), ConeParams.complexherm(3)], ids=str)
def test_schur_reduction(cone, rng):
    lam = rng.uniform(-1.5, 1.5, cone.rank)
    x = frame_element(cone, lam)
    for m in enumerate_partitions(cone.rank, 10):
        assert phi_eval(cone, m, x) == pytest.approx(schur_normalized(lam, m), abs=1e-10)
    # arbitrary (non-diagonal) complexified element via its eigenvalues
    z = random_complex_element(cone, rng)
    eig = np.linalg.eigvals(z.data)
    for m in enumerate_partitions(cone.rank, 6):
        assert phi_eval(cone, m, z) == pytest.approx(schur_normalized(eig, m), abs=1e-9)


@pytest.mark.parametrize("cone", [c for c in ALL_CONES if c.rank == 2], ids=str)
def test_rank2_one_row_oracle(cone, rng):
    x = random_element(cone, rng)
    lam = spectral_values(x)
    for m in enumerate_partitions(2, 12):
        assert phi_eval(cone, m, x) == pytest.approx(rank2_oracle(lam, m, cone.half_d), rel=1e-9, abs=1e-10)


def test_rank3_one_row_oracle(rng):
    cone = ConeParams.realsym(3)
    lam = rng.uniform(-1, 1.5, 3)
    x = frame_element(cone, lam)
    for k in range(9):
        expect = one_row_jack(lam, k, 0.5) / one_row_at_one(k, 3, 0.5)
        assert phi_eval(cone, (k, 0, 0), x) == pytest.approx(expect, abs=1e-10)


@pytest.mark.parametrize("cone", ALL_CONES, ids=str)
def test_invariance(cone, rng):
    parts = enumerate_partitions(cone.rank, 8)
    x = random_element(cone, rng)
    base = phi_eval_many(cone, parts, x)
    for seed in range(20):
        kx = haar_kl_sample(cone, seed).apply(x)
        assert np.all(np.abs(phi_eval_many(cone, parts, kx) - base) <= 1e-9 * (1 + np.abs(base)))


@pytest.mark.parametrize("cone", [ConeParams.realsym(2), ConeParams.realsym(3), ConeParams.complexherm(2),
                                  ConeParams.complexherm(3)], ids=str)
def test_haar_oracle(cone, rng):
    x = random_element(cone, rng)
    for m in enumerate_partitions(cone.rank, 6)[1:]:
        mc = spherical_via_haar(cone, m, x, 40000, 7)
        assert abs(mc.value - phi_eval(cone, m, x)) <= max(4 * mc.stderr, 1e-12)


def test_haar_oracle_examples():
    c = ConeParams.realsym(2)
    x = frame_element(c, [1.0, 2.0])
    mc = spherical_via_haar(c, (2, 0), x, 100000, 1)
    assert abs(mc.value - phi_eval(c, (2, 0), x)) <= 3 * mc.stderr
    assert spherical_via_haar(c, (0, 0), x, 10, 1).value == 1
    on_e = spherical_via_haar(c, (3, 1), identity(c), 50, 1)
    assert on_e.value == pytest.approx(1.0) and on_e.stderr == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(UnsupportedBackend):
        spherical_via_haar(ConeParams.lorentz(3), (1, 0), identity(ConeParams.lorentz(3)), 10, 1)


@pytest.mark.parametrize("cone", ALL_CONES, ids=str)
def test_two_argument_kernel(cone, rng):
    z = random_complex_element(cone, rng)
    x = random_cone_element(cone, rng)
    e = identity(cone)
    for m in enumerate_partitions(cone.rank, 5):
        assert phi_eval2(cone, m, z, e) == pytest.approx(phi_eval(cone, m, z), abs=1e-12)
        assert phi_eval2(cone, m, e, x) == pytest.approx(phi_eval(cone, m, x), rel=1e-10)
    assert phi_eval2(cone, (0,) * cone.rank, z, x) == 1
    with pytest.raises(NotInClosedCone):
        phi_eval2(cone, (1,) + (0,) * (cone.rank - 1), z, scalar_element(cone, -1.0))


@pytest.mark.parametrize("cone", ALL_CONES, ids=str)
def test_exponential_expansion(cone, rng):
    w = random_complex_element(cone, rng)
    w = w / np.max(np.abs(spectral_values(w)))
    parts = enumerate_partitions(cone.rank, 20)
    vals = phi_eval_many(cone, parts, w)
    coef = np.array([dim_km(cone, m) / pochhammer(cone, cone.n_over_r, m) for m in parts])
    assert abs(np.sum(coef * vals) - np.exp(jtrace(w))) < 1e-8


def test_weight_limit():
    c = ConeParams.realsym(2)
    with pytest.raises(WeightLimitExceeded):
        jack_coeffs(c, (41, 0))
    with raised_weight_limit(45):
        jack_coeffs(ConeParams.line(), (45,))


def test_disk_cache_round_trip(tmp_path):
    cache = JackCache(tmp_path)
    first = cache.get(2, 1, (3, 1))
    assert (tmp_path / JackCache.FILENAME).exists()
    again = JackCache(tmp_path)
    assert again.get(2, 1, (3, 1)).coeffs == first.coeffs
    assert len(list(again.entries())) > 0
    again.clear()
    assert not (tmp_path / JackCache.FILENAME).exists() or len(list(JackCache(tmp_path).entries())) == 0
