"""Testing the exterior algebra with even blocks."""

import random

import pytest

from neat_ann.exterior_algebra import (
    BlockShape,
    EElement,
    IndexOutOfRange,
    InvalidShape,
    basis_vector,
    blade_piece,
    blade_sign,
    decomposition_count,
    direct_sum_pieces,
    embed,
    is_even,
    parse_e_element,
    partial_products,
    wedge,
    xi_block,
)
from neat_ann.quotient_algebra import a_monomial
from neat_ann.scalars import QQ, AlgebraError, Field, MixedContext
from neat_ann.sparse import ElementSyntaxError, popcount

from .utils import homogeneous_e_element, random_a_element, random_e_element

SHAPES = [(2,), (2, 2), (2, 4), (2, 2, 2), (4, 2)]


@pytest.mark.parametrize(
    "text, sizes",
    [("2", (2,)), ("2,2", (2, 2)), ("2,2,4", (2, 2, 4)), (" 4 , 6 ", (4, 6))],
)
def test_shape_parse(text: str, sizes):
    """Test parsing comma separated block sizes."""
    shape = BlockShape.parse(text)
    assert shape.block_sizes == sizes
    assert shape.s == len(sizes)
    assert shape.n == sum(sizes)
    assert str(shape) == ",".join(map(str, sizes))


@pytest.mark.parametrize("text", ["", "3", "2,1", "0", "a,b", "2,,2", "-2"])
def test_shape_parse_invalid(text: str):
    """Test odd, empty and unparsable shapes."""
    with pytest.raises(InvalidShape):
        BlockShape.parse(text)


def test_shape_cap():
    """Test that n is capped, with an override."""
    with pytest.raises(InvalidShape):
        BlockShape.parse("8,8")
    assert BlockShape.parse("8,8", max_n=16).n == 16
    with pytest.raises(InvalidShape):
        BlockShape(())


def test_shape_indexing():
    """Test the block-major bit layout."""
    shape = BlockShape((2, 4))
    assert shape.offset(1) == 0
    assert shape.offset(2) == 2
    assert shape.bit(2, 3) == 4
    assert shape.block_mask(2) == 0b111100
    assert shape.block_of(4) == (2, 3)
    assert shape.label(1) == "x1_2"
    with pytest.raises(IndexOutOfRange):
        shape.bit(2, 5)
    with pytest.raises(IndexOutOfRange):
        shape.offset(3)
    with pytest.raises(IndexError):
        shape.block_of(6)


@pytest.mark.parametrize(
    "a, b, sign",
    [(0b10, 0b01, -1), (0b01, 0b10, 1), (0b110, 0b001, 1), (0b100, 0b011, 1), (0b010, 0b101, -1)],
)
def test_blade_sign(a: int, b: int, sign: int):
    """Test the crossing count sign rule."""
    assert blade_sign(a, b) == sign


def test_basis_vectors_anticommute(field: Field):
    """Test v ^ w = -w ^ v and v ^ v = 0."""
    shape = BlockShape((2, 2))
    v = basis_vector(field, shape, 1, 2)
    w = basis_vector(field, shape, 2, 1)
    assert wedge(v, w) == -wedge(w, v)
    assert wedge(v, v).is_zero()
    if field.is_rational:
        assert str(wedge(w, v)) == "-x1_2*x2_1"


@pytest.mark.parametrize("sizes", SHAPES)
def test_wedge_associative(field: Field, rng: random.Random, sizes):
    """Test associativity and distributivity of the wedge product."""
    shape = BlockShape(sizes)
    for _ in range(15):
        a, b, c = (random_e_element(rng, field, shape) for _ in range(3))
        assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))
        assert wedge(a, b + c) == wedge(a, b) + wedge(a, c)
        assert a * b == wedge(a, b)


@pytest.mark.parametrize("sizes", SHAPES)
def test_graded_commutativity(qq: Field, rng: random.Random, sizes):
    """Test a ^ b = (-1)**(pq) b ^ a for homogeneous a and b."""
    shape = BlockShape(sizes)
    for p in range(1, 4):
        for q in range(1, 4):
            a = homogeneous_e_element(rng, qq, shape, p)
            b = homogeneous_e_element(rng, qq, shape, q)
            ab, ba = wedge(a, b), wedge(b, a)
            assert ab == (ba if p * q % 2 == 0 else -ba)


@pytest.mark.parametrize("sizes", [*SHAPES, (2, 4, 4), (2, 2, 2, 4)])
def test_block_elements_are_central(qq: Field, sizes):
    """Test that every xi_k is even and commutes with every basis blade."""
    shape = BlockShape(sizes)
    blades = [EElement(qq, shape, {mask: 1}) for mask in range(1 << shape.n)]
    for k in range(1, shape.s + 1):
        xi = xi_block(shape, k)
        assert is_even(xi)
        assert wedge(xi, xi).is_zero()
        for blade in blades:
            assert wedge(xi, blade) == wedge(blade, xi)


def test_partial_products():
    """Test the blades of nonempty proper subsets of a block."""
    shape = BlockShape((2, 4))
    first = partial_products(shape, 1)
    assert [str(p) for p in first] == ["x1_1", "x1_2"]
    second = partial_products(shape, 2)
    assert len(second) == 14
    assert all(p.coefficient(shape.block_mask(2)) == 0 for p in second)
    assert str(second[0]) == "x2_1"


@pytest.mark.parametrize("sizes", SHAPES)
def test_embed_is_multiplicative(field: Field, rng: random.Random, sizes):
    """Test embed(a * b) = embed(a) ^ embed(b)."""
    shape = BlockShape(sizes)
    for _ in range(10):
        a = random_a_element(rng, field, shape.s)
        b = random_a_element(rng, field, shape.s)
        assert embed(shape, a * b) == wedge(embed(shape, a), embed(shape, b))
        assert is_even(embed(shape, a))


def test_embed_monomial():
    """Test that xi_1 * xi_2 maps to the product of the block blades."""
    shape = BlockShape((2, 2))
    image = embed(shape, a_monomial(QQ, 2, [1, 2]))
    assert image == wedge(xi_block(shape, 1), xi_block(shape, 2))
    assert str(image) == "x1_1*x1_2*x2_1*x2_2"
    with pytest.raises(MixedContext):
        embed(shape, a_monomial(QQ, 3, [1]))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("x1_2*x1_1", "-x1_1*x1_2"),
        ("x1_1*x1_2", "x1_1*x1_2"),
        ("x2_1*x1_2*x1_1", "-x1_1*x1_2*x2_1"),
        ("x1_1*x1_1 + 1", "1"),
        ("2*x2_2 - 1/2*x1_1", "-1/2*x1_1 + 2*x2_2"),
    ],
)
def test_parse_e_element(qq: Field, text: str, expected: str):
    """Test that factors are wedged in written order."""
    shape = BlockShape((2, 2))
    element = parse_e_element(text, qq, shape)
    assert str(element) == expected
    assert parse_e_element(str(element), qq, shape) == element


@pytest.mark.parametrize("text", ["x3_1", "x1_3", "x1", "y1_1", "x1_1*"])
def test_parse_e_element_errors(qq: Field, text: str):
    """Test unknown or out-of-range basis vectors."""
    with pytest.raises(ElementSyntaxError):
        parse_e_element(text, qq, BlockShape((2, 2)))


def test_invalid_blade_mask(qq: Field):
    """Test that masks must fit in n bits."""
    with pytest.raises(AlgebraError):
        EElement(qq, BlockShape((2,)), {0b100: 1})


def test_mixed_shapes(qq: Field):
    """Test that different shapes do not combine."""
    a = basis_vector(qq, BlockShape((2,)), 1, 1)
    b = basis_vector(qq, BlockShape((2, 2)), 1, 1)
    with pytest.raises(MixedContext):
        wedge(a, b)


@pytest.mark.parametrize("sizes, pieces", [((2,), 3), ((2, 2), 9), ((2, 4), 45), ((4,), 15)])
def test_direct_sum_pieces(sizes, pieces: int):
    """Test the number of summands and their total dimension."""
    shape = BlockShape(sizes)
    found = list(direct_sum_pieces(shape))
    assert len(found) == pieces
    assert decomposition_count(shape) == 2**shape.n
    assert sum(p.dimension for p in found) == 2**shape.n


@pytest.mark.parametrize("sizes", SHAPES)
def test_blade_piece_is_bijective(sizes):
    """Test that each blade lands in exactly one summand position."""
    shape = BlockShape(sizes)
    pieces = set(direct_sum_pieces(shape))
    seen = set()
    for mask in range(1 << shape.n):
        piece, a_mask = blade_piece(shape, mask)
        assert piece in pieces
        assert 0 <= a_mask < piece.dimension
        assert popcount(piece.p_mask) + sum(
            shape.block_sizes[k - 1] for i, k in enumerate(piece.free) if a_mask >> i & 1
        ) == popcount(mask)
        seen.add((piece, a_mask))
    assert len(seen) == 2**shape.n
