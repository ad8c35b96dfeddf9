import random
from fractions import Fraction

import pytest

from quivinv.field import (
    RATIONALS,
    FieldError,
    Mat,
    Mod,
    PrimeField,
    SingularMatrixError,
    field_from_spec,
)


def test_mod_normalization():
    assert Mod(7, 5) == Mod(2, 5)
    assert Mod(-1, 5) == Mod(4, 5)
    assert Mod(3, 7) + Mod(5, 7) == Mod(1, 7)
    assert Mod(3, 7) * Mod(5, 7) == Mod(1, 7)
    assert -Mod(2, 7) == Mod(5, 7)


def test_mod_division_and_powers():
    a = Mod(3, 101)
    assert a / a == Mod(1, 101)
    assert a ** -1 * a == Mod(1, 101)
    assert (Mod(2, 7) / Mod(3, 7)) * Mod(3, 7) == Mod(2, 7)


def test_mod_fraction_coercion():
    f = PrimeField(7)
    assert f.coerce(Fraction(1, 2)) * Mod(2, 7) == Mod(1, 7)
    assert Fraction(3, 2) * Mod(2, 7) == Mod(3, 7)


def test_prime_field_rejects_small_or_composite():
    for bad in (2, 3, 4, 9, 1):
        with pytest.raises(FieldError):
            PrimeField(bad)


def test_field_from_spec():
    assert field_from_spec("rational") is RATIONALS
    assert field_from_spec("101").p == 101
    assert field_from_spec(7).p == 7


def test_rationals_lowest_terms():
    x = RATIONALS.coerce(Fraction(4, -6))
    assert x.numerator == -2 and x.denominator == 3


@pytest.mark.parametrize("field", [RATIONALS, PrimeField(101)])
def test_det_matches_cofactor_oracle(field):
    # Oracle: Leibniz expansion over all permutations.
    from itertools import permutations

    rng = random.Random(7)
    for _ in range(20):
        n = rng.randint(1, 4)
        m = Mat([[field.rand(rng) for _ in range(n)] for _ in range(n)])
        leibniz = field.zero
        for perm in permutations(range(n)):
            sign = 1
            for i in range(n):
                for j in range(i + 1, n):
                    if perm[i] > perm[j]:
                        sign = -sign
            term = field.one
            for i in range(n):
                term = term * m[i, perm[i]]
            leibniz = leibniz + (term if sign > 0 else -term)
        assert m.det() == leibniz


@pytest.mark.parametrize("field", [RATIONALS, PrimeField(101)])
def test_inverse(field):
    rng = random.Random(11)
    for _ in range(20):
        n = rng.randint(1, 4)
        while True:
            m = Mat([[field.rand(rng) for _ in range(n)] for _ in range(n)])
            if m.det():
                break
        assert m * m.inv() == Mat.identity(n, field)
        assert m.inv() * m == Mat.identity(n, field)


def test_singular_inverse_raises():
    with pytest.raises(SingularMatrixError):
        Mat([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]).inv()


def test_symplectic_form():
    j = Mat.symplectic(4)
    assert j.is_skew()
    assert j * j == -Mat.identity(4)
    with pytest.raises(ValueError):
        Mat.symplectic(3)


def test_matrix_algebra_basics():
    a = Mat([[1, 2], [3, 4]])
    b = Mat([[0, 1], [1, 0]])
    assert a * b == Mat([[2, 1], [4, 3]])
    assert (a + b) - b == a
    assert a.transpose().transpose() == a
    assert (a * b).transpose() == b.transpose() * a.transpose()
