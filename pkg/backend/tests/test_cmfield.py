import pytest

from app.core.exceptions import NotCyclic, NotPositive, NotPrimitive, NotTotallyImaginary
from app.models.cmfield import (
    cm_from_surd,
    dtilde_from_generators,
    galois_generator,
    is_primitive,
    relative_discriminant,
    rho,
    splitting_in_K,
)
from app.models.quadfield import PrimeKind, QuadIdealFactored, split_type
from tests.conftest import LIGHT_ROWS


def test_dtilde_polynomial_for_fixture_rows(fixtures):
    for f in fixtures:
        D = 4 * f.d if f.d % 4 != 1 else f.d
        assert dtilde_from_generators(D, f.alpha0, f.alpha1, f.beta0, f.beta1) == f.expected_dtilde


def test_dtilde_polynomial_rejects_mixed_sign_delta():
    # nu = -2 + omega has conjugates of both signs, N(delta) = -16
    with pytest.raises(NotPositive):
        dtilde_from_generators(5, 0, 0, -2, 1)


@pytest.mark.parametrize("key", LIGHT_ROWS)
def test_relative_discriminant_norm_is_dtilde(build_field, key):
    K = build_field(key)
    assert relative_discriminant(K).norm() == K.dtilde
    assert K.dtilde % K.field.d == 0


def test_cyclic_square_root_lies_in_f(build_field):
    K = build_field("dt29")
    assert K.dtilde == 29
    assert K.dtilde_cofactor == 1
    assert K.sqrt_dtilde * K.sqrt_dtilde == K.field.element(29)


@pytest.mark.parametrize("key", ["dt5", "dt13", "dt29", "dt64x5", "dt5x169"])
def test_galois_generator_squares_to_complex_conjugation(build_field, key):
    K = build_field(key)
    sigma = galois_generator(K)
    assert sigma.g * sigma.g.conjugate() == -1
    assert sigma.c.conjugate() + sigma.g.conjugate() * sigma.c == K.tau
    (c0, c1), (g0, g1) = sigma.coefficients()
    assert K.field.from_basis(c0, c1) == sigma.c
    assert K.field.from_basis(g0, g1) == sigma.g


def test_rho_of_unit_ideal(build_field):
    K = build_field("dt29")
    assert rho(K, QuadIdealFactored()) == 1
    assert rho(K, relative_discriminant(K)) == 1


def test_rejects_biquadratic_and_real_surds():
    assert not is_primitive(5, -3, 1)
    with pytest.raises(NotPrimitive):
        cm_from_surd(5, -3, 1, 0, 0, 1, 0)
    with pytest.raises(NotTotallyImaginary):
        cm_from_surd(5, 10, 2, -3, 1, 1, 0)


def test_rejects_non_cyclic_surd():
    # a^2 - b^2 d = 7 and d * 7 is not a square
    with pytest.raises(NotCyclic):
        cm_from_surd(2, -3, 1, 0, 0, 6, -1)


@pytest.mark.parametrize("d, a, b", [(5, -5, 1), (29, -29, 2), (5, -10, -2)])
def test_is_primitive(d, a, b):
    assert is_primitive(d, a, b)


def test_splitting_in_q_zeta5(build_field):
    K = build_field("dt5")
    F = K.field
    assert {splitting_in_K(K, P) for P in split_type(F, 11)} == {PrimeKind.SPLIT}
    assert splitting_in_K(K, split_type(F, 2)[0]) == PrimeKind.INERT
    assert splitting_in_K(K, split_type(F, 5)[0]) == PrimeKind.RAMIFIED
    assert relative_discriminant(K).norm() == 5


def test_rho_local_factors(build_field):
    K = build_field("dt5")
    F = K.field
    P11 = split_type(F, 11)[0]
    (P2,) = split_type(F, 2)
    assert rho(K, QuadIdealFactored.prime(P11)) == 2
    assert rho(K, QuadIdealFactored.prime(P2, 3)) == 0
    assert rho(K, QuadIdealFactored.prime(P2, 2)) == 1
    assert rho(K, QuadIdealFactored.prime(P11, -1)) == 0
    both = QuadIdealFactored.from_mapping({P11: 2, P2: 2})
    assert rho(K, both) == rho(K, QuadIdealFactored.prime(P11, 2)) * rho(
        K, QuadIdealFactored.prime(P2, 2)
    )


@pytest.mark.parametrize("key", LIGHT_ROWS)
def test_ramification_matches_discriminant_support(build_field, key):
    K = build_field(key)
    disc = relative_discriminant(K)
    for p in (2, 3, 5, 7, 11, 13, 17, 29, 37, 41):
        for P in split_type(K.field, p):
            ramified = splitting_in_K(K, P) == PrimeKind.RAMIFIED
            assert ramified == (disc.exponent(P) > 0)


@pytest.mark.parametrize("key", ["dt5", "dt29", "dt37"])
def test_splitting_is_galois_uniform(build_field, rng, key):
    K = build_field(key)
    primes = [p for p in range(2, 400) if all(p % q for q in range(2, p))]
    for p in rng.sample(primes, 50):
        above = split_type(K.field, p)
        kinds = {splitting_in_K(K, P) for P in above}
        assert len(kinds) == 1
        if above[0].kind == PrimeKind.INERT:
            assert kinds != {PrimeKind.SPLIT}
