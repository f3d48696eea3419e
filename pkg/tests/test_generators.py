"""Testing the generator families and the closed-form helpers."""

import pytest
from sympy import catalan

from neat_ann.exterior_algebra import BlockShape, embed, wedge, xi_block
from neat_ann.generators import (
    MAX_PERMUTATION_LENGTH,
    InvalidScheme,
    PairingScheme,
    TooLarge,
    avoids_pattern,
    divisibility_witness,
    dimension_ledger,
    enumerate_exterior_generators,
    enumerate_GS,
    enumerate_PS,
    enumerate_schemes,
    exterior_generator_specs,
    gamma_product,
    gs_count,
    half_length,
    mu_element,
    shadow,
    stack_polynomial,
    stack_sortable_perms,
)
from neat_ann.quotient_algebra import a_monomial, a_multiply, parse_a_element
from neat_ann.scalars import QQ, AlgebraError, Field, field_make

from .utils import contains_pattern, pattern_avoiders

GS_COUNTS = [(1, 1), (2, 2), (3, 4), (4, 10), (5, 26), (6, 76), (7, 232), (8, 764)]


@pytest.mark.parametrize("s, count", GS_COUNTS)
def test_gs_count(s: int, count: int):
    """Test the closed form and the enumeration agree with known counts."""
    assert gs_count(s) == count
    schemes = list(enumerate_schemes(s))
    assert len(schemes) == count
    assert len(set(schemes)) == count
    assert all(scheme.covers(s) for scheme in schemes)


def test_scheme_order():
    """Test schemes come by number of pairs, then by the paired set."""
    assert [str(scheme) for scheme in enumerate_schemes(3)] == [
        "|1,2,3",
        "(1,2)|3",
        "(1,3)|2",
        "(2,3)|1",
    ]
    assert [str(scheme) for scheme in enumerate_schemes(4)][-3:] == [
        "(1,2)(3,4)|",
        "(1,3)(2,4)|",
        "(1,4)(2,3)|",
    ]


@pytest.mark.parametrize(
    "pairs, singles",
    [
        (((2, 1),), ()),
        (((1, 2), (2, 3)), ()),
        (((3, 4), (1, 2)), ()),
        (((1, 2),), (2,)),
        ((), (3, 1)),
    ],
)
def test_invalid_schemes(pairs, singles):
    """Test that overlapping or non-canonical schemes are refused."""
    with pytest.raises(InvalidScheme):
        PairingScheme(pairs, singles)


def test_scheme_make_and_check():
    """Test canonicalisation and the index range check."""
    scheme = PairingScheme.make([(4, 3), (2, 1)], [5])
    assert scheme == PairingScheme(((1, 2), (3, 4)), (5,))
    assert scheme.covers(5)
    assert not scheme.covers(6)
    assert scheme.check(5) is scheme
    with pytest.raises(InvalidScheme):
        scheme.check(4)
    with pytest.raises(InvalidScheme):
        gamma_product(QQ, 4, scheme)


def test_mu_element(qq: Field):
    """Test mu is the sum of the variables."""
    assert str(mu_element(qq, 3)) == "x1 + x2 + x3"
    with pytest.raises(AlgebraError):
        mu_element(qq, 0)


def test_gamma_product(qq: Field):
    """Test the expanded product for a small scheme."""
    scheme = PairingScheme.make([(1, 2)], [3])
    assert str(gamma_product(qq, 3, scheme)) == "x1*x3 - x2*x3"
    assert shadow(qq, 3, scheme) == gamma_product(qq, 3, scheme)
    full = PairingScheme((), (1, 2, 3))
    assert gamma_product(qq, 3, full) == a_monomial(qq, 3, [1, 2, 3])


@pytest.mark.parametrize("s", range(1, 9))
def test_gs_elements_annihilate_mu(field: Field, s: int):
    """Test every covering product kills mu in every characteristic."""
    mu = mu_element(field, s)
    family = enumerate_GS(field, s)
    assert len(family) == gs_count(s)
    for element in family:
        assert a_multiply(element, mu).is_zero()


@pytest.mark.parametrize("d", range(0, 8))
@pytest.mark.parametrize("convention, pattern", [("231", (2, 3, 1)), ("312", (3, 1, 2))])
def test_stack_sortable_perms(d: int, convention: str, pattern):
    """Test the enumeration against a brute-force pattern filter."""
    perms = stack_sortable_perms(d, convention)
    assert len(perms) == catalan(d)
    assert perms == sorted(pattern_avoiders(d, pattern))
    assert all(avoids_pattern(p, pattern) for p in perms)


def test_stack_sortable_perms_errors():
    """Test argument validation."""
    with pytest.raises(AlgebraError):
        stack_sortable_perms(3, "123")
    with pytest.raises(AlgebraError):
        stack_sortable_perms(-1)
    with pytest.raises(TooLarge):
        stack_sortable_perms(MAX_PERMUTATION_LENGTH + 1)


@pytest.mark.parametrize(
    "perm, pattern, expected",
    [
        ((2, 3, 1), (2, 3, 1), False),
        ((1, 2, 3), (2, 3, 1), True),
        ((3, 1, 2, 4), (2, 3, 1), True),
        ((2, 4, 1, 3), (2, 3, 1), False),
        ((3, 1, 2), (3, 1, 2), False),
    ],
)
def test_avoids_pattern(perm, pattern, expected: bool):
    """Test pattern avoidance on small permutations."""
    assert avoids_pattern(perm, pattern) is expected
    assert contains_pattern(perm, pattern) is not expected


@pytest.mark.parametrize("s, d", [(1, 1), (2, 1), (3, 2), (4, 2), (5, 3), (8, 4)])
def test_half_length(s: int, d: int):
    """Test d is the integral part of (s + 1) / 2."""
    assert half_length(s) == d


def test_stack_polynomial(qq: Field):
    """Test the product for s = 3 and s = 4."""
    assert str(stack_polynomial(qq, 3, (1, 2))) == "x1*x3 - x2*x3"
    expected = parse_a_element("x1*x3 - x1*x4 - x2*x3 + x2*x4", qq, 4)
    assert stack_polynomial(qq, 4, (1, 2)) == expected
    assert stack_polynomial(qq, 4, (2, 1)) == parse_a_element(
        "x3*x1 - x3*x4 - x2*x1 + x2*x4", qq, 4
    )


@pytest.mark.parametrize("s", range(1, 9))
def test_ps_elements_annihilate_mu(field: Field, s: int):
    """Test every stack-sortable product kills mu."""
    mu = mu_element(field, s)
    family = enumerate_PS(field, s)
    assert len(family) == catalan(half_length(s))
    for element in family:
        assert a_multiply(element, mu).is_zero()


@pytest.mark.parametrize("sizes, count", [((2,), 2), ((2, 2), 5), ((2, 2, 2), 14), ((2, 4), 9)])
def test_exterior_generator_count(sizes, count: int):
    """Test the number of exterior generators per shape."""
    shape = BlockShape(sizes)
    assert len(list(exterior_generator_specs(shape))) == count
    assert len(enumerate_exterior_generators(QQ, shape)) == count


@pytest.mark.parametrize("sizes", [(2,), (2, 2), (2, 4), (2, 2, 2)])
def test_exterior_generators_annihilate_mu(field: Field, sizes):
    """Test every exterior generator kills the sum of the block elements."""
    shape = BlockShape(sizes)
    mu = xi_block(shape, 1, field)
    for k in range(2, shape.s + 1):
        mu = mu + xi_block(shape, k, field)
    assert mu == embed(shape, mu_element(field, shape.s))
    for generator in enumerate_exterior_generators(field, shape):
        assert not generator.is_zero()
        assert wedge(generator, mu).is_zero()
        assert wedge(mu, generator).is_zero()


def test_exterior_generator_text():
    """Test the first generators of shape (2,2)."""
    shape = BlockShape((2, 2))
    specs = list(exterior_generator_specs(shape))
    assert str(specs[0]) == "|1,2[x1_1,x2_1]"
    assert str(specs[-1]) == "(1,2)|[]"
    generators = enumerate_exterior_generators(QQ, shape)
    assert str(generators[0]) == "x1_1*x2_1"
    assert str(generators[-1]) == "x1_1*x1_2 - x2_1*x2_2"


@pytest.mark.parametrize(
    "characteristic, s, subset",
    [(0, 3, [1, 2]), (0, 5, [1, 2, 3]), (0, 6, [2, 3, 5, 6]), (5, 5, [1, 3, 4]), (7, 7, [1, 2, 3, 4])],
)
def test_divisibility_witness(characteristic: int, s: int, subset):
    """Test the closed form w with w * mu = M_K."""
    field = field_make(characteristic)
    w = divisibility_witness(field, s, subset)
    assert a_multiply(w, mu_element(field, s)) == a_monomial(field, s, subset)


def test_divisibility_witness_errors():
    """Test the size condition and the characteristic condition."""
    with pytest.raises(AlgebraError):
        divisibility_witness(QQ, 4, [1, 2])
    with pytest.raises(AlgebraError):
        divisibility_witness(field_make(3), 5, [1, 2, 3])


@pytest.mark.parametrize(
    "sizes, z, elementary, total",
    [
        ((2, 2), (2, 2), (1, 4, 4), 16),
        ((2, 4), (2, 14), (1, 16, 28), 64),
        ((4, 4), (14, 14), (1, 28, 196), 256),
        ((2, 2, 4), (2, 2, 14), (1, 18, 60, 56), 256),
    ],
)
def test_dimension_ledger(sizes, z, elementary, total: int):
    """Test the elementary symmetric values and the 2**n total."""
    ledger = dimension_ledger(BlockShape(sizes))
    assert ledger.z == z
    assert ledger.elementary == elementary
    assert ledger.total == total == 2 ** sum(sizes)
