from fractions import Fraction

import pytest

from app.core.exceptions import InvalidPrime, ZeroElement
from app.models.quadfield import (
    PrimeKind,
    QuadField,
    QuadIdealFactored,
    ideal_of_element,
    is_totally_positive,
    kronecker,
    padic_order,
    split_type,
    valuation,
)


def test_discriminant_and_omega():
    F5, F2 = QuadField(5), QuadField(2)
    assert (F5.D, F5.omega_norm) == (5, 5)
    assert (F2.D, F2.omega_norm) == (8, 14)
    for F in (F5, F2, QuadField(29)):
        assert F.omega.trace() == F.D
        assert F.omega.norm() == F.omega_norm
        assert F.omega.to_basis() == (0, 1)


def test_rejects_non_squarefree():
    with pytest.raises(ValueError):
        QuadField(12)


def test_arithmetic_identities(rng):
    F = QuadField(13)
    for _ in range(25):
        x = F.element(Fraction(rng.randint(-9, 9), rng.randint(1, 4)), rng.randint(-9, 9))
        y = F.element(rng.randint(-9, 9), Fraction(rng.randint(1, 9), rng.randint(1, 4)))
        assert (x * y).norm() == x.norm() * y.norm()
        assert (x * y) / y == x
        assert (x + y).conjugate() == x.conjugate() + y.conjugate()


def test_sqrt():
    F = QuadField(5)
    t = F.element(3, 1) ** 2
    root = t.sqrt()
    assert root is not None and root * root == t
    assert F.element(2).sqrt() is None


def test_rational_elements_compare_with_int_and_fraction():
    F = QuadField(2)
    assert F.element(-1) == -1
    assert F.element(Fraction(1, 2)) == Fraction(1, 2)
    assert F.sqrt_d() * F.sqrt_d() == 2
    assert F.sqrt_d() != 0
    assert hash(F.element(3)) == hash(3)
    assert len({F.element(Fraction(6, 2)), 3, Fraction(3)}) == 1


def test_padic_order():
    assert padic_order(Fraction(50, 3), 5) == 2
    assert padic_order(Fraction(50, 3), 3) == -1
    with pytest.raises(ZeroElement):
        padic_order(0, 2)


def test_split_types_in_q_sqrt5():
    F = QuadField(5)
    assert kronecker(5, 11) == 1
    assert [P.kind for P in split_type(F, 5)] == [PrimeKind.RAMIFIED]
    assert [P.kind for P in split_type(F, 2)] == [PrimeKind.INERT]
    assert [P.kind for P in split_type(F, 3)] == [PrimeKind.INERT]
    split = split_type(F, 11)
    assert [P.kind for P in split] == [PrimeKind.SPLIT, PrimeKind.SPLIT]
    assert [str(P) for P in split] == ["P11_0", "P11_1"]
    with pytest.raises(InvalidPrime):
        split_type(F, 9)


def test_valuations_and_factorisation():
    F = QuadField(5)
    P0, P1 = split_type(F, 11)
    eleven = F.element(11)
    assert valuation(eleven, P0) == valuation(eleven, P1) == 1
    sqrt5 = F.sqrt_d()
    (P5,) = split_type(F, 5)
    assert valuation(sqrt5, P5) == 1
    assert ideal_of_element(F.element(Fraction(11, 5))).norm() == Fraction(121, 25)
    # 4 + √5 has norm 11 and lies in exactly one prime above 11
    t = ideal_of_element(F.element(4, 1))
    assert t.norm() == 11 and len(t.primes()) == 1


def test_factored_ideal_algebra():
    F = QuadField(5)
    P0, P1 = split_type(F, 11)
    a = QuadIdealFactored.from_mapping({P0: 2, P1: 1})
    b = QuadIdealFactored.prime(P0)
    assert (a / b).exponent(P0) == 1
    assert (a / b).is_integral()
    assert not (b / a).is_integral()
    assert (a * a.inverse()).items == ()
    assert a.norm() == 11**3


def test_valuation_examples():
    F = QuadField(5)
    (P5,) = split_type(F, 5)
    assert valuation(F.element(5), P5) == 2
    assert valuation(F.from_basis(0, 1) - F.element(2), P5) == 0
    assert valuation(F.element(Fraction(1, 2), Fraction(1, 2)), P5) == 0


def test_is_totally_positive():
    F = QuadField(5)
    assert is_totally_positive(F.element(1))
    assert not is_totally_positive(F.sqrt_d())
    assert is_totally_positive(F.element(3, 1))
    assert not is_totally_positive(F.element(2, 1))


def test_ideal_of_element_examples():
    F = QuadField(5)
    assert ideal_of_element(F.element(1)).items == ()
    P0, P1 = split_type(F, 11)
    assert ideal_of_element(F.element(11)).as_dict() == {P0: 1, P1: 1}
    (P5,) = split_type(F, 5)
    assert ideal_of_element(F.omega).as_dict() == {P5: 1}


@pytest.mark.parametrize("d", [2, 5, 13, 29])
def test_valuation_is_additive_and_matches_the_norm(rng, d):
    F = QuadField(d)
    primes = [p for p in range(2, 100) if all(p % q for q in range(2, p))]
    for _ in range(15):
        t = F.from_basis(rng.randint(-30, 30) or 1, rng.randint(-30, 30))
        u = F.from_basis(rng.randint(-30, 30), rng.randint(-30, 30) or 1)
        if not t or not u:
            continue
        for p in rng.sample(primes, 5):
            above = split_type(F, p)
            for P in above:
                assert valuation(t * u, P) == valuation(t, P) + valuation(u, P)
            norm_order = padic_order(t.norm(), p)
            assert sum(P.f * valuation(t, P) for P in above) == norm_order


def test_split_type_is_deterministic():
    split_type.cache_clear()
    first = split_type(QuadField(29), 5)
    split_type.cache_clear()
    assert split_type(QuadField(29), 5) == first
    assert [P.label for P in first] == [0, 1]
