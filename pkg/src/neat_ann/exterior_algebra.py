"""The exterior algebra E(V) on V = V1 + ... + Vs with even blocks.

Basis vectors x_{k,j} are laid out block-major: block k occupies the bits
``offset(k) .. offset(k) + n_k - 1``. A blade is a bitmask and its basis
vectors are wedged in increasing bit order.
"""

import re
from dataclasses import dataclass
from itertools import product
from typing import TYPE_CHECKING, Iterator, List, Mapping, Optional, Tuple

from .quotient_algebra import AElement
from .scalars import QQ, AlgebraError, Field, FieldElem, MixedContext
from .sparse import ElementSyntaxError, SparseElement, bits, popcount, split_terms

if TYPE_CHECKING:
    from .scalars import ScalarLike

DEFAULT_MAX_N = 14

VAR_RE = re.compile(r"^x(\d+)_(\d+)$")


class InvalidShape(AlgebraError, ValueError):  # noqa: N818
    """Raised for odd, empty or oversized block shapes."""


class IndexOutOfRange(AlgebraError, IndexError):  # noqa: N818
    """Raised when a block or basis index does not exist."""


@dataclass(frozen=True)
class BlockShape:
    """Block sizes (n1, ..., ns) of the decomposition of V."""

    block_sizes: Tuple[int, ...]

    def __post_init__(self) -> None:
        """Every block must be even and at least 2."""
        if not self.block_sizes:
            raise InvalidShape("a shape needs at least one block")
        for size in self.block_sizes:
            if size < 2 or size % 2:
                raise InvalidShape(
                    f"block sizes must be even and at least 2, got {size}"
                )

    @classmethod
    def parse(cls, text: str, max_n: Optional[int] = None) -> "BlockShape":
        """Parse `2,2,4` and check n against the cap."""
        try:
            sizes = tuple(int(part) for part in text.split(","))
        except ValueError:
            raise InvalidShape(f"cannot parse block sizes {text!r}") from None
        return cls(sizes).check(max_n)

    def check(self, max_n: Optional[int] = None) -> "BlockShape":
        """Raise InvalidShape when n exceeds the cap."""
        limit = DEFAULT_MAX_N if max_n is None else max_n
        if self.n > limit:
            raise InvalidShape(f"n={self.n} exceeds the limit of {limit}")
        return self

    def __str__(self) -> str:
        """Comma separated sizes."""
        return ",".join(map(str, self.block_sizes))

    @property
    def s(self) -> int:
        """Number of blocks."""
        return len(self.block_sizes)

    @property
    def n(self) -> int:
        """Dimension of V."""
        return sum(self.block_sizes)

    def _check_block(self, k: int) -> None:
        if not 1 <= k <= self.s:
            raise IndexOutOfRange(f"block {k} is not in 1..{self.s}")

    def offset(self, k: int) -> int:
        """Bit position of x_{k,1}."""
        self._check_block(k)
        return sum(self.block_sizes[: k - 1])

    def bit(self, k: int, j: int) -> int:
        """Bit position of x_{k,j}."""
        self._check_block(k)
        if not 1 <= j <= self.block_sizes[k - 1]:
            raise IndexOutOfRange(
                f"basis vector {j} is not in 1..{self.block_sizes[k - 1]} of block {k}"
            )
        return self.offset(k) + j - 1

    def block_mask(self, k: int) -> int:
        """Mask of all basis vectors of block k."""
        return ((1 << self.block_sizes[k - 1]) - 1) << self.offset(k)

    def block_of(self, bit: int) -> Tuple[int, int]:
        """(k, j) of a bit position."""
        for k, size in enumerate(self.block_sizes, start=1):
            if bit < size:
                return k, bit + 1
            bit -= size
        raise IndexOutOfRange(f"bit {bit} is outside n={self.n}")

    def label(self, bit: int) -> str:
        """Textual name `x{k}_{j}` of a basis vector."""
        k, j = self.block_of(bit)
        return f"x{k}_{j}"


def blade_sign(a: int, b: int) -> int:
    """Sign of blade(a) ^ blade(b) relative to blade(a | b).

    Counts the pairs i in a, j in b with i > j; assumes disjoint masks.
    """
    crossings = 0
    for j in bits(b):
        crossings += popcount(a >> (j + 1))
    return -1 if crossings & 1 else 1


class EElement(SparseElement):
    """A multivector: blade masks mapped to scalars."""

    __slots__ = ("shape",)

    shape: BlockShape

    def __init__(
        self, field: Field, shape: BlockShape, coeffs: Mapping[int, "ScalarLike"]
    ) -> None:
        """Build an element; masks must fit in n bits."""
        full = (1 << shape.n) - 1
        for mask in coeffs:
            if mask < 0 or mask & ~full:
                raise AlgebraError(f"blade mask {mask:#b} is not valid for n={shape.n}")
        object.__setattr__(self, "shape", shape)
        super().__init__(field, coeffs)

    def context(self) -> BlockShape:
        """The block shape."""
        return self.shape

    def _new(self, coeffs: Mapping[int, "ScalarLike"]) -> "EElement":
        return EElement(self.field, self.shape, coeffs)

    def _label(self, mask: int) -> str:
        return "*".join(self.shape.label(bit) for bit in bits(mask))

    def __mul__(self, other: object) -> "EElement":
        """Wedge product, or scaling by a scalar."""
        if isinstance(other, EElement):
            return wedge(self, other)
        if isinstance(other, (int, str, FieldElem)) or hasattr(other, "denominator"):
            return self.scale(other)  # type: ignore[arg-type]
        return NotImplemented

    def __rmul__(self, other: object) -> "EElement":
        """Scalar times element."""
        if isinstance(other, EElement):
            return wedge(other, self)
        return self.__mul__(other)


def wedge(a: EElement, b: EElement) -> EElement:
    """Exterior product with the crossing-count sign rule."""
    a.check_compatible(b)
    field = a.field
    add, mul, neg = field.add, field.mul, field.neg
    out: dict = {}
    for ma, ca in a.terms():
        for mb, cb in b.terms():
            if ma & mb:
                continue
            value = mul(ca, cb)
            if blade_sign(ma, mb) < 0:
                value = neg(value)
            mask = ma | mb
            out[mask] = add(out[mask], value) if mask in out else value
    return EElement(field, a.shape, out)


def is_even(e: EElement) -> bool:
    """Whether every blade has even degree."""
    return all(popcount(mask) % 2 == 0 for mask in e.coeffs)


def basis_vector(field: Field, shape: BlockShape, k: int, j: int) -> EElement:
    """The basis vector x_{k,j}."""
    return EElement(field, shape, {1 << shape.bit(k, j): 1})


def xi_block(shape: BlockShape, k: int, field: Field = QQ) -> EElement:
    """The block element xi_k = x_{k,1} ^ ... ^ x_{k,n_k}."""
    return EElement(field, shape, {shape.block_mask(k): 1})


def partial_products(shape: BlockShape, k: int, field: Field = QQ) -> List[EElement]:
    """Blades of the nonempty proper subsets of block k, by increasing mask."""
    offset = shape.offset(k)
    size = shape.block_sizes[k - 1]
    return [
        EElement(field, shape, {sub << offset: 1}) for sub in range(1, (1 << size) - 1)
    ]


def embed_mask(shape: BlockShape, mask: int) -> int:
    """Blade of the monomial with the given A-mask."""
    out = 0
    for i in bits(mask):
        out |= shape.block_mask(i + 1)
    return out


def embed(shape: BlockShape, a: AElement) -> EElement:
    """Image of an element of A under xi_k -> block blade k."""
    if a.s != shape.s:
        raise MixedContext(f"cannot embed an element with s={a.s} into shape {shape}")
    return EElement(a.field, shape, {embed_mask(shape, m): c for m, c in a.terms()})


def parse_e_element(text: str, field: Field, shape: BlockShape) -> EElement:
    """Parse `2*x1_1*x2_2 - x1_2 + 1`; factors are wedged in written order."""
    out: dict = {}
    for coeff, variables in split_terms(text):
        mask, negative, vanishes = 0, False, False
        for token in variables:
            match = VAR_RE.match(token)
            if not match:
                raise ElementSyntaxError(text, f"unknown variable {token!r}")
            try:
                bit = shape.bit(int(match.group(1)), int(match.group(2)))
            except IndexOutOfRange as exc:
                raise ElementSyntaxError(text, exc.msg) from exc
            if mask >> bit & 1:
                vanishes = True
                continue
            if popcount(mask >> (bit + 1)) & 1:
                negative = not negative
            mask |= 1 << bit
        if vanishes:
            continue
        value = field.parse(coeff)
        if negative:
            value = field.neg(value)
        out[mask] = field.add(out[mask], value) if mask in out else value
    return EElement(field, shape, out)


@dataclass(frozen=True)
class DecompositionPiece:
    """One summand A_{L'} * p_L of the block decomposition of E.

    `partial` lists the blocks in L, `p_mask` is the chosen product of
    partial blades on them, and `free` lists the blocks in L'.
    """

    partial: Tuple[int, ...]
    p_mask: int
    free: Tuple[int, ...]

    @property
    def dimension(self) -> int:
        """Dimension of the summand, 2**|L'|."""
        return 1 << len(self.free)


def direct_sum_pieces(shape: BlockShape) -> Iterator[DecompositionPiece]:
    """Summands of E, one per (L, choice of p_l for l in L)."""
    blocks = range(1, shape.s + 1)
    for choice in product(*(range(1 << size) for size in shape.block_sizes)):
        partial, free, p_mask = [], [], 0
        skip = False
        for k, sub in zip(blocks, choice):
            full = (1 << shape.block_sizes[k - 1]) - 1
            if sub == full:
                skip = True
                break
            if sub == 0:
                free.append(k)
            else:
                partial.append(k)
                p_mask |= sub << shape.offset(k)
        if not skip:
            yield DecompositionPiece(tuple(partial), p_mask, tuple(free))


def blade_piece(shape: BlockShape, mask: int) -> Tuple[DecompositionPiece, int]:
    """Summand containing a blade, and the A-mask (over L') it carries."""
    partial, free, p_mask, a_mask = [], [], 0, 0
    for k in range(1, shape.s + 1):
        block = shape.block_mask(k)
        part = mask & block
        if part == block:
            free.append(k)
            a_mask |= 1 << (len(free) - 1)
        elif part == 0:
            free.append(k)
        else:
            partial.append(k)
            p_mask |= part
    return DecompositionPiece(tuple(partial), p_mask, tuple(free)), a_mask


def decomposition_count(shape: BlockShape) -> int:
    """Total dimension of the summands; equals 2**n."""
    return sum(piece.dimension for piece in direct_sum_pieces(shape))
