"""Exact scalar arithmetic over the rationals and prime fields.

Everything above this layer stores *raw* scalars (``Fraction`` over the
rationals, canonical ``int`` residues over GF(p)) and routes arithmetic
through the owning :class:`Field`. :class:`FieldElem` wraps a raw scalar with
its field for the public API.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from sympy import isprime

Scalar = Union[Fraction, int]
ScalarLike = Union["FieldElem", Fraction, int, str]

# residues times residues must stay inside int64 in the numpy fast path
MAX_CHARACTERISTIC = 2**31


class AlgebraError(Exception):
    """Base exception for everything raised by neat_ann."""

    def __init__(self, msg: str) -> None:
        """Instantiate exception with a msg."""
        self.msg: str = msg
        super().__init__(msg)

    def __str__(self) -> str:
        """Provide str repr of the msg."""
        return self.msg


class CompositeCharacteristic(AlgebraError, ValueError):  # noqa: N818
    """Raised when a characteristic is neither 0 nor a prime."""

    def __init__(self, characteristic: int) -> None:
        """Instantiate exception with the offending characteristic."""
        self.characteristic = characteristic
        super().__init__(f"characteristic {characteristic} is neither 0 nor a prime")


class UnsupportedCharacteristic(AlgebraError, ValueError):  # noqa: N818
    """Raised for negative characteristics or primes beyond the supported range."""

    def __init__(self, characteristic: int) -> None:
        """Instantiate exception with the offending characteristic."""
        self.characteristic = characteristic
        super().__init__(
            f"characteristic {characteristic} is outside [0, {MAX_CHARACTERISTIC})"
        )


class DivisionByZero(AlgebraError, ZeroDivisionError):  # noqa: N818
    """Raised when inverting zero in a field."""


class MixedContext(AlgebraError, ValueError):  # noqa: N818
    """Raised when operands live over different fields or ambient algebras."""


@dataclass(frozen=True)
class Field:
    """The base field: the rationals (characteristic 0) or GF(p)."""

    characteristic: int

    def __post_init__(self) -> None:
        """Validate the characteristic."""
        char = self.characteristic
        if char < 0 or char >= MAX_CHARACTERISTIC:
            raise UnsupportedCharacteristic(char)
        if char != 0 and not isprime(char):
            raise CompositeCharacteristic(char)

    def __str__(self) -> str:
        """Short name, `QQ` or `GF(p)`."""
        return "QQ" if self.is_rational else f"GF({self.characteristic})"

    @property
    def is_rational(self) -> bool:
        """Whether this is the field of rationals."""
        return self.characteristic == 0

    @property
    def zero(self) -> Scalar:
        """Raw zero."""
        return Fraction(0) if self.is_rational else 0

    @property
    def one(self) -> Scalar:
        """Raw one."""
        return Fraction(1) if self.is_rational else 1

    def coerce(self, value: ScalarLike) -> Scalar:
        """Convert an int, Fraction, decimal string or FieldElem to a raw scalar."""
        if isinstance(value, FieldElem):
            if value.field != self:
                raise MixedContext(f"cannot use a {value.field} scalar in {self}")
            return value.value
        if isinstance(value, str):
            try:
                value = Fraction(value.strip())
            except ZeroDivisionError:
                raise DivisionByZero(f"{value!r} has a zero denominator") from None
        if self.is_rational:
            return Fraction(value)

        p = self.characteristic
        if isinstance(value, Fraction):
            den = value.denominator % p
            if den == 0:
                raise DivisionByZero(f"{value} has no image in {self}")
            return value.numerator * pow(den, -1, p) % p
        return int(value) % p

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        """Raw addition."""
        if self.is_rational:
            return a + b
        return (a + b) % self.characteristic

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        """Raw subtraction."""
        if self.is_rational:
            return a - b
        return (a - b) % self.characteristic

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        """Raw multiplication."""
        if self.is_rational:
            return a * b
        return (a * b) % self.characteristic

    def neg(self, a: Scalar) -> Scalar:
        """Raw negation."""
        if self.is_rational:
            return -a
        return -a % self.characteristic

    def inv(self, a: Scalar) -> Scalar:
        """Raw inverse, raises DivisionByZero on zero."""
        if a == 0:
            raise DivisionByZero(f"cannot invert zero in {self}")
        if self.is_rational:
            return 1 / Fraction(a)
        return pow(a, -1, self.characteristic)

    def power(self, a: Scalar, exponent: int) -> Scalar:
        """Raw power with an integer exponent (negative exponents invert)."""
        if exponent < 0:
            return self.power(self.inv(a), -exponent)
        if self.is_rational:
            return Fraction(a) ** exponent
        return pow(a, exponent, self.characteristic)

    @staticmethod
    def is_zero(a: Scalar) -> bool:
        """Whether a raw scalar is zero."""
        return a == 0

    def bit_size(self, a: Scalar) -> int:
        """Size of a raw scalar, used to pick pivots that limit growth."""
        if self.is_rational:
            assert isinstance(a, Fraction)
            return a.numerator.bit_length() + a.denominator.bit_length()
        return 0

    def factorial_inverse(self, k: int) -> Scalar:
        """Raw 1/k!, which only exists when the characteristic is 0 or above k."""
        return self.inv(self.coerce(math.factorial(k)))

    def format(self, a: Scalar) -> str:
        """Textual form: `a` or `a/b` over QQ, the residue over GF(p)."""
        return str(a)

    def parse(self, text: str) -> Scalar:
        """Parse `a` or `a/b` into a raw scalar."""
        return self.coerce(text)

    def element(self, value: ScalarLike) -> "FieldElem":
        """Wrap a value as a FieldElem of this field."""
        return FieldElem(self, value)


QQ = Field(0)


class FieldElem:
    """An immutable scalar tied to its field."""

    __slots__ = ("field", "value")

    field: Field
    value: Scalar

    def __init__(self, field: Field, value: ScalarLike) -> None:
        """Build a scalar, canonicalising the value."""
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", field.coerce(value))

    def __setattr__(self, name: str, value: object) -> None:
        """Scalars are immutable."""
        raise AttributeError(f"{type(self).__name__} is immutable")

    def _other(self, other: ScalarLike) -> Scalar:
        return self.field.coerce(other)

    def __add__(self, other: ScalarLike) -> "FieldElem":
        """Field addition."""
        return FieldElem(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other: ScalarLike) -> "FieldElem":
        """Field subtraction."""
        return FieldElem(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other: ScalarLike) -> "FieldElem":
        """Reflected subtraction."""
        return FieldElem(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other: ScalarLike) -> "FieldElem":
        """Field multiplication."""
        return FieldElem(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "FieldElem":
        """Field division."""
        inverse = self.field.inv(self._other(other))
        return FieldElem(self.field, self.field.mul(self.value, inverse))

    def __rtruediv__(self, other: ScalarLike) -> "FieldElem":
        """Reflected division."""
        return FieldElem(self.field, self._other(other)) / self

    def __neg__(self) -> "FieldElem":
        """Additive inverse."""
        return FieldElem(self.field, self.field.neg(self.value))

    def __pow__(self, exponent: int) -> "FieldElem":
        """Integer power."""
        return FieldElem(self.field, self.field.power(self.value, exponent))

    def __eq__(self, other: object) -> bool:
        """Equal to scalars of the same field, or to plain ints/fractions."""
        if isinstance(other, FieldElem):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, Fraction)):
            try:
                return self.value == self.field.coerce(other)
            except DivisionByZero:
                return False
        return NotImplemented

    def __hash__(self) -> int:
        """Hash by field and value."""
        return hash((self.field, self.value))

    def __bool__(self) -> bool:
        """Nonzero test."""
        return self.value != 0

    def __str__(self) -> str:
        """Textual scalar."""
        return self.field.format(self.value)

    def __repr__(self) -> str:
        """Scalar with its field."""
        return f"FieldElem({self.field}, {self})"

    def inverse(self) -> "FieldElem":
        """Multiplicative inverse."""
        return FieldElem(self.field, self.field.inv(self.value))


@lru_cache(maxsize=None)
def field_make(characteristic: int) -> Field:
    """Field descriptor for characteristic 0 (QQ) or a prime p (GF(p))."""
    return Field(characteristic)


def field_inv(x: FieldElem) -> FieldElem:
    """Multiplicative inverse; DivisionByZero when x is zero."""
    return x.inverse()
