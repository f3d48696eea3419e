"""The squarefree algebra A = F[x1, ..., xs] / (x1**2, ..., xs**2).

A monomial is a subset of {1, ..., s}, stored as a bitmask with variable i
at bit i - 1. A is commutative and graded by degree, and the coefficient of
the full monomial gives a nondegenerate symmetric pairing on it.
"""

import re
from typing import TYPE_CHECKING, Iterable, List, Mapping, Optional

from .exact_linalg import ScalarMatrix
from .scalars import AlgebraError, Field, FieldElem
from .sparse import ElementSyntaxError, SparseElement, popcount, split_terms

if TYPE_CHECKING:
    from .scalars import ScalarLike

__all__ = [
    "DEFAULT_MAX_S",
    "AElement",
    "ElementSyntaxError",
    "TooManyVariables",
    "a_constant",
    "a_homogeneous_part",
    "a_leading_coefficient",
    "a_monomial",
    "a_multiply",
    "a_pairing",
    "check_s",
    "gram_matrix",
    "is_permutation_matrix",
    "parse_a_element",
]

DEFAULT_MAX_S = 16

VAR_RE = re.compile(r"^x(\d+)$")


class TooManyVariables(AlgebraError, ValueError):  # noqa: N818
    """Raised when s exceeds the configured cap."""

    def __init__(self, s: int, max_s: int) -> None:
        """Instantiate exception with the requested and allowed s."""
        self.s = s
        self.max_s = max_s
        super().__init__(f"s={s} exceeds the limit of {max_s} variables")


def check_s(s: int, max_s: Optional[int] = None) -> int:
    """Validate the number of variables."""
    limit = DEFAULT_MAX_S if max_s is None else max_s
    if s < 0:
        raise AlgebraError(f"s must be nonnegative, got {s}")
    if s > limit:
        raise TooManyVariables(s, limit)
    return s


class AElement(SparseElement):
    """An element of A: squarefree monomial masks mapped to scalars."""

    __slots__ = ("s",)

    s: int

    def __init__(self, field: Field, s: int, coeffs: Mapping[int, "ScalarLike"]) -> None:
        """Build an element; masks must fit in s bits."""
        full = (1 << s) - 1
        for mask in coeffs:
            if mask < 0 or mask & ~full:
                raise AlgebraError(f"monomial mask {mask:#b} is not valid for s={s}")
        object.__setattr__(self, "s", s)
        super().__init__(field, coeffs)

    def context(self) -> int:
        """Number of variables."""
        return self.s

    def _new(self, coeffs: Mapping[int, "ScalarLike"]) -> "AElement":
        return AElement(self.field, self.s, coeffs)

    def _label(self, mask: int) -> str:
        return "*".join(f"x{i + 1}" for i in range(self.s) if mask >> i & 1)

    @property
    def full_mask(self) -> int:
        """Mask of the top monomial x1*...*xs."""
        return (1 << self.s) - 1

    def __mul__(self, other: object) -> "AElement":
        """Product in A, or scaling by a scalar."""
        if isinstance(other, AElement):
            return a_multiply(self, other)
        if isinstance(other, (int, str, FieldElem)) or hasattr(other, "denominator"):
            return self.scale(other)  # type: ignore[arg-type]
        return NotImplemented

    def __rmul__(self, other: object) -> "AElement":
        """Scalar times element (A is commutative)."""
        return self.__mul__(other)

    def __pow__(self, exponent: int) -> "AElement":
        """Nonnegative integer power."""
        if exponent < 0:
            raise AlgebraError("negative powers are not defined in A")
        result = a_constant(self.field, self.s, 1)
        for _ in range(exponent):
            result = a_multiply(result, self)
        return result


def a_multiply(a: AElement, b: AElement) -> AElement:
    """Product in A: disjoint monomials multiply to their union, others vanish."""
    a.check_compatible(b)
    field = a.field
    add, mul = field.add, field.mul
    out: dict = {}
    for ma, ca in a.terms():
        for mb, cb in b.terms():
            if ma & mb:
                continue
            mask = ma | mb
            value = mul(ca, cb)
            out[mask] = add(out[mask], value) if mask in out else value
    return AElement(field, a.s, out)


def a_homogeneous_part(a: AElement, k: int) -> AElement:
    """Degree-k component of a."""
    if k < 0:
        raise AlgebraError(f"degree must be nonnegative, got {k}")
    return AElement(a.field, a.s, {m: c for m, c in a.terms() if popcount(m) == k})


def a_leading_coefficient(a: AElement) -> FieldElem:
    """Coefficient of the full monomial x1*...*xs."""
    return a.coefficient(a.full_mask)


def a_pairing(a: AElement, b: AElement) -> FieldElem:
    """The pairing B(a, b): leading coefficient of the product."""
    a.check_compatible(b)
    field = a.field
    full = a.full_mask
    total = field.zero
    for mask, value in a.terms():
        other = b.coeffs.get(full ^ mask)
        if other is not None:
            total = field.add(total, field.mul(value, other))
    return field.element(total)


def a_monomial(
    field: Field, s: int, indices: Iterable[int], coeff: "ScalarLike" = 1
) -> AElement:
    """The monomial x_{i1}*...*x_{ik} (1-based indices); repeats give zero."""
    mask = 0
    for i in indices:
        if not 1 <= i <= s:
            raise AlgebraError(f"variable x{i} is not valid for s={s}")
        bit = 1 << (i - 1)
        if mask & bit:
            return AElement(field, s, {})
        mask |= bit
    return AElement(field, s, {mask: coeff})


def a_constant(field: Field, s: int, value: "ScalarLike") -> AElement:
    """The constant element value * 1."""
    return AElement(field, s, {0: value})


def parse_a_element(text: str, field: Field, s: int) -> AElement:
    """Parse `3*x1*x2 - x3 + 1/2` into an element of A.

    A term with a repeated variable is zero, as x_i**2 = 0 in A.
    """
    out: dict = {}
    for coeff, variables in split_terms(text):
        mask = 0
        repeated = False
        for token in variables:
            match = VAR_RE.match(token)
            if not match:
                raise ElementSyntaxError(text, f"unknown variable {token!r}")
            i = int(match.group(1))
            if not 1 <= i <= s:
                raise ElementSyntaxError(text, f"variable {token} outside x1..x{s}")
            bit = 1 << (i - 1)
            repeated = repeated or bool(mask & bit)
            mask |= bit
        if repeated:
            continue
        value = field.parse(coeff)
        out[mask] = field.add(out[mask], value) if mask in out else value
    return AElement(field, s, out)


def gram_matrix(field: Field, s: int) -> ScalarMatrix:
    """Matrix of the pairing on the monomial basis, ordered by mask."""
    size = 1 << s
    basis = [AElement(field, s, {mask: 1}) for mask in range(size)]
    entries = []
    for left in basis:
        entries.extend(a_pairing(left, right).value for right in basis)
    return ScalarMatrix(field, size, size, tuple(entries))


def is_permutation_matrix(m: ScalarMatrix) -> bool:
    """Whether m is square with exactly one 1 in every row and column."""
    if m.rows != m.cols:
        return False
    seen: List[bool] = [False] * m.cols
    for i in range(m.rows):
        ones = [j for j, v in enumerate(m.row(i)) if v != 0]
        if len(ones) != 1 or m.entry(i, ones[0]) != 1 or seen[ones[0]]:
            return False
        seen[ones[0]] = True
    return True

