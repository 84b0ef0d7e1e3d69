"""Field axioms and exact arithmetic for the coefficient field Q(i, sqrt3)."""

import random
from fractions import Fraction

import pytest

from phbochner.scalar import I, ONE, SQRT3, ZERO, ScalarExact, rational


def random_scalar(rng, max_den=7):
    def fr():
        return Fraction(rng.randint(-6, 6), rng.randint(1, max_den))
    return ScalarExact(fr(), fr(), fr(), fr())


def test_constants():
    assert I * I == ScalarExact(-1)
    assert SQRT3 * SQRT3 == ScalarExact(3)
    assert ONE + ZERO == ONE


def test_field_axioms_randomized():
    rng = random.Random(12345)
    for _ in range(200):
        a, b, c = (random_scalar(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a
        assert a * b == b * a
        if not a.is_zero():
            assert a * a.inverse() == ONE
            assert (b / a) * a == b


def test_conjugation():
    rng = random.Random(99)
    assert I.conjugate() == -I
    assert SQRT3.conjugate() == SQRT3
    for _ in range(100):
        a, b = random_scalar(rng), random_scalar(rng)
        assert a.conjugate().conjugate() == a
        assert (a + b).conjugate() == a.conjugate() + b.conjugate()
        assert (a * b).conjugate() == a.conjugate() * b.conjugate()


def test_exact_equality_no_floats():
    third = rational(1, 3)
    assert third + third + third == ONE
    assert hash(rational(2, 4)) == hash(rational(1, 2))


def test_division_errors():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_predicates_and_parts():
    z = ScalarExact(Fraction(1, 2), 0, 1, 0)
    assert not z.is_real()
    assert z.conjugate() + z == ScalarExact(1)
    assert rational(5).is_rational()
    assert rational(5).as_fraction() == 5
    with pytest.raises(ValueError):
        z.as_fraction()


def test_to_complex():
    z = ScalarExact(1, 1, 2, 0)  # 1 + sqrt3 + 2i
    w = z.to_complex()
    assert abs(w.real - (1 + 3 ** 0.5)) < 1e-15
    assert abs(w.imag - 2) < 1e-15


def test_pow():
    a = ScalarExact(1, 1, 1, 0)
    assert a ** 3 == a * a * a
    assert a ** 0 == ONE
    assert a ** -2 == (a * a).inverse()


def test_str_forms():
    assert str(rational(29, 48)) == "29/48"
    assert str(-I) == "-i"
    assert str(SQRT3 * rational(-2)) == "-2*s3"
    assert str(rational(4) + I * SQRT3) == "4 + i*s3"
