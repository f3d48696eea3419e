"""Sparse coefficient maps shared by the algebra element types.

Both algebras have bases indexed by subset bitmasks, so an element is a map
from masks to nonzero raw scalars. Keys are kept sorted so iteration, text
and reports are deterministic.
"""

import re
from types import MappingProxyType
from typing import (
    TYPE_CHECKING,
    Callable,
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Tuple,
    TypeVar,
)

from .scalars import AlgebraError, MixedContext

if TYPE_CHECKING:
    from .scalars import Field, FieldElem, Scalar, ScalarLike

_E = TypeVar("_E", bound="SparseElement")

Vector = Dict[int, "Scalar"]

TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")
COEFF_RE = re.compile(r"^\d+(/\d+)?$")


class ElementSyntaxError(AlgebraError, ValueError):  # noqa: N818
    """Raised when textual element syntax cannot be parsed."""

    def __init__(self, text: str, reason: str) -> None:
        """Instantiate exception with the offending text and the reason."""
        self.text = text
        super().__init__(f"cannot parse {text!r}: {reason}")


def popcount(mask: int) -> int:
    """Number of set bits."""
    return bin(mask).count("1")


def bits(mask: int) -> Iterator[int]:
    """Positions of the set bits, ascending."""
    pos = 0
    while mask:
        if mask & 1:
            yield pos
        mask >>= 1
        pos += 1


def split_terms(text: str) -> List[Tuple[str, List[str]]]:
    """Split `3*x1*x2 - 1/2*x3 + 1` into (signed coefficient, variables).

    The coefficient is returned as text (`-3`, `1/2`); variables are the
    remaining `*`-separated tokens in written order.
    """
    stripped = text.strip()
    if not stripped:
        raise ElementSyntaxError(text, "empty expression")

    terms: List[Tuple[str, List[str]]] = []
    pos = 0
    for match in TERM_RE.finditer(stripped):
        if match.start() != pos:
            raise ElementSyntaxError(text, f"unexpected input at {pos}")
        pos = match.end()
        sign, body = match.group(1) or "+", match.group(2).strip()

        coeff = "1"
        variables: List[str] = []
        for factor in (f.strip() for f in body.split("*")):
            if not factor:
                raise ElementSyntaxError(text, "empty factor")
            if COEFF_RE.match(factor):
                if coeff != "1" or variables:
                    raise ElementSyntaxError(text, "coefficient must lead a term")
                coeff = factor
            else:
                variables.append(factor)
        terms.append((coeff if sign == "+" else f"-{coeff}", variables))

    if pos != len(stripped):
        raise ElementSyntaxError(text, f"unexpected input at {pos}")
    return terms


class SparseElement:
    """Immutable sparse element; subclasses fix the basis and the product."""

    __slots__ = ("_coeffs", "field")

    field: "Field"
    _coeffs: Mapping[int, "Scalar"]

    def __init__(self, field: "Field", coeffs: Mapping[int, "ScalarLike"]) -> None:
        """Canonicalise coefficients, dropping zeros and sorting masks."""
        canon = {}
        for mask in sorted(coeffs):
            value = field.coerce(coeffs[mask])
            if value != 0:
                canon[mask] = value
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "_coeffs", MappingProxyType(canon))

    def __setattr__(self, name: str, value: object) -> None:
        """Elements are immutable."""
        raise AttributeError(f"{type(self).__name__} is immutable")

    # subclasses provide the context (s or shape) and how to rebuild
    def context(self) -> object:
        """The ambient descriptor that must match for arithmetic."""
        raise NotImplementedError

    def _new(self: _E, coeffs: Mapping[int, "ScalarLike"]) -> _E:
        raise NotImplementedError

    def _label(self, mask: int) -> str:
        raise NotImplementedError

    def check_compatible(self, other: "SparseElement") -> None:
        """Raise MixedContext unless both share field, type and context."""
        if type(self) is not type(other):
            raise MixedContext(
                f"cannot combine {type(self).__name__} with {type(other).__name__}"
            )
        if self.field != other.field:
            raise MixedContext(f"field mismatch: {self.field} vs {other.field}")
        if self.context() != other.context():
            raise MixedContext(f"context mismatch: {self.context()} vs {other.context()}")

    @property
    def coeffs(self) -> Mapping[int, "Scalar"]:
        """Read-only mask -> raw scalar map, in increasing mask order."""
        return self._coeffs

    def terms(self) -> Iterator[Tuple[int, "Scalar"]]:
        """(mask, raw coefficient) pairs in increasing mask order."""
        return iter(self._coeffs.items())

    def coefficient(self, mask: int) -> "FieldElem":
        """Coefficient of a basis element."""
        return self.field.element(self._coeffs.get(mask, self.field.zero))

    def is_zero(self) -> bool:
        """Whether every coefficient vanishes."""
        return not self._coeffs

    def __bool__(self) -> bool:
        """Nonzero test."""
        return bool(self._coeffs)

    def __len__(self) -> int:
        """Number of nonzero terms."""
        return len(self._coeffs)

    def degree(self) -> int:
        """Largest degree of a term; -1 for zero."""
        return max((popcount(m) for m in self._coeffs), default=-1)

    def is_homogeneous(self) -> bool:
        """Whether all terms share one degree."""
        return len({popcount(m) for m in self._coeffs}) <= 1

    def vector(self) -> Vector:
        """Mutable copy of the coefficients keyed by basis index."""
        return dict(self._coeffs)

    def __add__(self: _E, other: _E) -> _E:
        """Coefficientwise sum."""
        self.check_compatible(other)
        out = dict(self._coeffs)
        add = self.field.add
        for mask, value in other.terms():
            out[mask] = add(out[mask], value) if mask in out else value
        return self._new(out)

    def __neg__(self: _E) -> _E:
        """Additive inverse."""
        neg = self.field.neg
        return self._new({m: neg(v) for m, v in self.terms()})

    def __sub__(self: _E, other: _E) -> _E:
        """Coefficientwise difference."""
        return self + (-other)

    def scale(self: _E, factor: "ScalarLike") -> _E:
        """Multiply every coefficient by a scalar."""
        value = self.field.coerce(factor)
        mul = self.field.mul
        return self._new({m: mul(value, c) for m, c in self.terms()})

    def __eq__(self, other: object) -> bool:
        """Coefficientwise equality within the same ambient algebra."""
        if not isinstance(other, SparseElement) or type(self) is not type(other):
            return NotImplemented
        return (
            self.field == other.field
            and self.context() == other.context()
            and dict(self._coeffs) == dict(other._coeffs)
        )

    def __hash__(self) -> int:
        """Hash by context and terms."""
        return hash((self.field, self.context(), tuple(self._coeffs.items())))

    def __str__(self) -> str:
        """Textual element syntax, e.g. `3*x1*x2 - x3 + 1`."""
        return format_terms(self.field, self.terms(), self._label)

    def __repr__(self) -> str:
        """Type, field and text."""
        return f"{type(self).__name__}({self.field}, {self.context()}, {self})"


def format_terms(
    field: "Field",
    terms: Iterable[Tuple[int, "Scalar"]],
    label: Callable[[int], str],
) -> str:
    """Render terms as `coef*label` joined with `+`/`-`."""
    out = ""
    for mask, value in terms:
        negative = field.is_rational and value < 0
        magnitude = -value if negative else value
        name = label(mask)
        if not name:
            body = field.format(magnitude)
        elif magnitude == 1:
            body = name
        else:
            body = f"{field.format(magnitude)}*{name}"

        if not out:
            out = f"-{body}" if negative else body
        else:
            out += f" - {body}" if negative else f" + {body}"
    return out or "0"
