"""Testing exact scalar arithmetic."""

import random
from fractions import Fraction

import pytest

from neat_ann.scalars import (
    QQ,
    CompositeCharacteristic,
    DivisionByZero,
    Field,
    FieldElem,
    MixedContext,
    UnsupportedCharacteristic,
    field_inv,
    field_make,
)


def random_scalar(rng: random.Random, field: Field) -> FieldElem:
    """Random element, fractions included over QQ."""
    if field.is_rational:
        return field.element(Fraction(rng.randint(-50, 50), rng.randint(1, 20)))
    return field.element(rng.randrange(field.characteristic))


@pytest.mark.parametrize(
    "characteristic, name",
    [(0, "QQ"), (2, "GF(2)"), (5, "GF(5)"), (2_147_483_647, "GF(2147483647)")],
)
def test_field_make(characteristic: int, name: str):
    """Test that 0 and primes make fields."""
    field = field_make(characteristic)
    assert field.characteristic == characteristic
    assert str(field) == name
    assert field_make(characteristic) is field


@pytest.mark.parametrize("characteristic", [1, 4, 9, 91])
def test_field_make_composite(characteristic: int):
    """Test that composite characteristics are refused."""
    with pytest.raises(CompositeCharacteristic) as exc_info:
        field_make(characteristic)
    assert exc_info.value.characteristic == characteristic
    assert isinstance(exc_info.value, ValueError)


@pytest.mark.parametrize("characteristic", [-3, 2**31, 2**61 - 1])
def test_field_make_unsupported(characteristic: int):
    """Test that negative or too large characteristics are refused."""
    with pytest.raises(UnsupportedCharacteristic):
        field_make(characteristic)


@pytest.mark.parametrize(
    "characteristic, value, expected",
    [(5, 2, 3), (0, Fraction(2, 3), Fraction(3, 2)), (13, 12, 12), (0, -4, Fraction(-1, 4))],
)
def test_field_inv(characteristic: int, value, expected):
    """Test inverses, including x * x^-1 = 1."""
    field = field_make(characteristic)
    x = field.element(value)
    assert field_inv(x) == expected
    assert x * field_inv(x) == 1


@pytest.mark.parametrize("characteristic", [0, 7])
def test_field_inv_zero(characteristic: int):
    """Test that zero has no inverse."""
    field = field_make(characteristic)
    with pytest.raises(DivisionByZero):
        field_inv(field.element(0))
    with pytest.raises(ZeroDivisionError):
        field.element(1) / 0


@pytest.mark.parametrize("characteristic", [0, 2, 3, 5, 7, 11, 13])
def test_field_axioms(characteristic: int):
    """Test the field axioms on random elements."""
    field = field_make(characteristic)
    rng = random.Random(characteristic)
    for _ in range(200):
        a, b, c = (random_scalar(rng, field) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert a + (-a) == 0
        assert a - b == a + (-b)
        if a:
            assert a * a.inverse() == 1
            assert (b / a) * a == b


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13])
def test_fermat(p: int):
    """Test x**p = x for every element of GF(p)."""
    field = field_make(p)
    for value in range(p):
        x = field.element(value)
        assert x**p == x


def test_rationals_are_arbitrary_precision():
    """Test that rational arithmetic never overflows or rounds."""
    big = QQ.element(Fraction(2**200 + 1, 3**90))
    product = big * big
    assert product.value == Fraction((2**200 + 1) ** 2, 3**180)
    assert str(QQ.element(Fraction(-2, 6))) == "-1/3"


@pytest.mark.parametrize(
    "value, expected",
    [(Fraction(1, 2), 3), ("1/2", 3), (-1, 4), ("7", 2), (12, 2)],
)
def test_coerce_into_prime_field(value, expected):
    """Test conversions of ints, fractions and strings into GF(5)."""
    assert field_make(5).element(value).value == expected


def test_coerce_denominator_divisible_by_p():
    """Test that 1/5 has no image in GF(5)."""
    with pytest.raises(DivisionByZero):
        field_make(5).element(Fraction(1, 5))


@pytest.mark.parametrize("characteristic", [0, 5])
def test_coerce_zero_denominator_text(characteristic: int):
    """Test that text with a zero denominator raises the library error."""
    with pytest.raises(DivisionByZero):
        field_make(characteristic).element("1/0")


def test_mixed_fields():
    """Test that scalars of different fields do not mix."""
    with pytest.raises(MixedContext):
        field_make(5).element(1) + field_make(7).element(1)
    assert field_make(5).element(1) != field_make(7).element(1)


def test_field_elem_is_immutable_and_hashable():
    """Test that scalars behave as values."""
    x = field_make(3).element(4)
    with pytest.raises(AttributeError):
        x.value = 2  # type: ignore[misc]
    assert x == 1
    assert {x, field_make(3).element(1)} == {x}
    assert repr(x) == "FieldElem(GF(3), 1)"


@pytest.mark.parametrize(
    "characteristic, k, expected",
    [(0, 4, Fraction(1, 24)), (5, 3, 1), (7, 3, 6)],
)
def test_factorial_inverse(characteristic: int, k: int, expected):
    """Test 1/k! exists when the characteristic is 0 or above k."""
    assert field_make(characteristic).factorial_inverse(k) == expected


def test_factorial_inverse_needs_large_characteristic():
    """Test that 1/3! does not exist in GF(3)."""
    with pytest.raises(DivisionByZero):
        field_make(3).factorial_inverse(3)
