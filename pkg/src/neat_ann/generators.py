"""Generator families of the annihilator of mu = xi_1 + ... + xi_s.

The families are built from products of differences (xi_i - xi_j) over
disjoint index pairs. In A every pairing scheme whose indices cover S
contributes one element; in E the unpaired blocks contribute single basis
vectors instead of whole blocks. Stack-sortable permutations pick out a
smaller generating family of A.
"""

import logging
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, List, Sequence, Tuple

from sympy import Poly, symbols
from sympy import binomial as sympy_binomial
from sympy import factorial2

from .exterior_algebra import BlockShape, EElement, basis_vector, embed, wedge
from .quotient_algebra import AElement, a_monomial, a_multiply
from .scalars import AlgebraError, Field

logger = logging.getLogger(__name__)

Permutation = Tuple[int, ...]

MAX_PERMUTATION_LENGTH = 12
STACK_CONVENTIONS = ("231", "312")


class InvalidScheme(AlgebraError, ValueError):  # noqa: N818
    """Raised for overlapping or non-canonical pairing schemes."""


class TooLarge(AlgebraError, ValueError):  # noqa: N818
    """Raised when an enumeration would be too large to build."""


@dataclass(frozen=True)
class PairingScheme:
    """Disjoint pairs (i, j) with i < j, sorted by i, plus the unpaired set K.

    Indices are 1-based.
    """

    pairs: Tuple[Tuple[int, int], ...]
    singles: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        """Check that the scheme is canonical and its indices distinct."""
        for i, j in self.pairs:
            if i >= j:
                raise InvalidScheme(f"pair ({i}, {j}) must have i < j")
        if list(self.pairs) != sorted(self.pairs):
            raise InvalidScheme("pairs must be sorted by their first index")
        if list(self.singles) != sorted(self.singles):
            raise InvalidScheme("unpaired indices must be sorted")
        indices = self.indices
        if len(set(indices)) != len(indices):
            raise InvalidScheme(f"indices overlap in {self}")

    @classmethod
    def make(
        cls, pairs: Iterable[Sequence[int]], singles: Iterable[int] = ()
    ) -> "PairingScheme":
        """Canonicalise: orient each pair as i < j and sort."""
        oriented = sorted((min(p), max(p)) for p in pairs)
        return cls(tuple((i, j) for i, j in oriented), tuple(sorted(singles)))

    @property
    def indices(self) -> List[int]:
        """All indices used by the scheme."""
        return [i for pair in self.pairs for i in pair] + list(self.singles)

    def check(self, s: int) -> "PairingScheme":
        """Raise InvalidScheme unless every index lies in 1..s."""
        if any(not 1 <= i <= s for i in self.indices):
            raise InvalidScheme(f"{self} uses indices outside 1..{s}")
        return self

    def covers(self, s: int) -> bool:
        """Whether the pairs and K exhaust {1, ..., s}."""
        return sorted(self.indices) == list(range(1, s + 1))

    def __str__(self) -> str:
        """`(1,2)(3,4)|5` style text."""
        pairs = "".join(f"({i},{j})" for i, j in self.pairs)
        return f"{pairs}|{','.join(map(str, self.singles))}"


def _matchings(items: Sequence[int]) -> Iterator[Tuple[Tuple[int, int], ...]]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for pos, partner in enumerate(rest):
        remaining = rest[:pos] + rest[pos + 1 :]
        for tail in _matchings(remaining):
            yield ((first, partner), *tail)


def enumerate_schemes(s: int) -> Iterator[PairingScheme]:
    """Canonical schemes covering {1..s}: by number of pairs, then paired set."""
    everything = range(1, s + 1)
    for r in range(s // 2 + 1):
        for paired in combinations(everything, 2 * r):
            singles = tuple(i for i in everything if i not in paired)
            for matching in _matchings(paired):
                yield PairingScheme(matching, singles)


def gs_count(s: int) -> int:
    """Number of covering schemes: sum over r of C(s, 2r) * (2r - 1)!!."""
    return int(
        sum(sympy_binomial(s, 2 * r) * factorial2(2 * r - 1) for r in range(s // 2 + 1))
    )


def mu_element(field: Field, s: int) -> AElement:
    """mu = xi_1 + ... + xi_s."""
    if s < 1:
        raise AlgebraError(f"s must be at least 1, got {s}")
    return AElement(field, s, {1 << i: 1 for i in range(s)})


def _difference(field: Field, s: int, i: int, j: int) -> AElement:
    return AElement(field, s, {1 << (i - 1): 1, 1 << (j - 1): -1})


def gamma_product(field: Field, s: int, scheme: PairingScheme) -> AElement:
    """M_K * (xi_i1 - xi_j1) * ... * (xi_ir - xi_jr), expanded."""
    scheme.check(s)
    result = a_monomial(field, s, scheme.singles)
    for i, j in scheme.pairs:
        result = a_multiply(result, _difference(field, s, i, j))
    return result


def shadow(field: Field, s: int, scheme: PairingScheme) -> AElement:
    """The A-element of an exterior generator, with each u_k replaced by xi_k."""
    return gamma_product(field, s, scheme)


def enumerate_GS(field: Field, s: int) -> List[AElement]:  # noqa: N802
    """One product per covering scheme, in `enumerate_schemes` order."""
    return [gamma_product(field, s, scheme) for scheme in enumerate_schemes(s)]


def avoids_pattern(perm: Sequence[int], pattern: Sequence[int]) -> bool:
    """Brute-force test that no subsequence of perm is order-isomorphic to pattern."""
    order = tuple(sorted(range(len(pattern)), key=lambda i: pattern[i]))
    for positions in combinations(range(len(perm)), len(pattern)):
        values = [perm[p] for p in positions]
        if tuple(sorted(range(len(values)), key=lambda i: values[i])) == order:
            return False
    return True


def _avoid_231(values: Sequence[int]) -> Iterator[Permutation]:
    # the maximum splits a 231-avoider into smaller values before larger ones
    if not values:
        yield ()
        return
    top = values[-1]
    for split in range(len(values)):
        for left in _avoid_231(values[:split]):
            for right in _avoid_231(values[split:-1]):
                yield (*left, top, *right)


def stack_sortable_perms(d: int, convention: str = "231") -> List[Permutation]:
    """Permutations of 1..d avoiding 231 (or 312), in lexicographic order."""
    if convention not in STACK_CONVENTIONS:
        raise AlgebraError(f"unknown stack convention {convention!r}")
    if d < 0:
        raise AlgebraError(f"permutation length must be nonnegative, got {d}")
    if d > MAX_PERMUTATION_LENGTH:
        raise TooLarge(f"d={d} exceeds the limit of {MAX_PERMUTATION_LENGTH}")

    perms = list(_avoid_231(tuple(range(1, d + 1))))
    if convention == "312":
        # reverse-complement maps 231-avoiders onto 312-avoiders
        perms = [tuple(d + 1 - v for v in reversed(p)) for p in perms]
    return sorted(perms)


def half_length(s: int) -> int:
    """d, the integral part of (s + 1) / 2."""
    return (s + 1) // 2


def stack_polynomial(field: Field, s: int, perm: Permutation) -> AElement:
    """(zeta_sigma(1) - eta_1) * ... * (zeta_sigma(d) - eta_d).

    zeta_k = xi_{2k-1}, eta_k = xi_{2k}, and eta_d = 0 when s is odd.
    """
    result = AElement(field, s, {0: 1})
    for k, sigma_k in enumerate(perm, start=1):
        zeta = 2 * sigma_k - 1
        factor = {1 << (zeta - 1): 1}
        if 2 * k <= s:
            factor[1 << (2 * k - 1)] = -1
        result = a_multiply(result, AElement(field, s, factor))
    return result


def enumerate_PS(field: Field, s: int, convention: str = "231") -> List[AElement]:  # noqa: N802
    """One stack-sortable polynomial per permutation of length d."""
    perms = stack_sortable_perms(half_length(s), convention)
    return [stack_polynomial(field, s, perm) for perm in perms]


@dataclass(frozen=True)
class ExteriorGeneratorSpec:
    """Which scheme and which basis vectors u_k build an exterior generator."""

    scheme: PairingScheme
    choices: Tuple[int, ...]

    def __str__(self) -> str:
        """Scheme followed by the chosen basis vectors."""
        chosen = ",".join(f"x{k}_{j}" for k, j in zip(self.scheme.singles, self.choices))
        return f"{self.scheme}[{chosen}]"


def exterior_generator_specs(shape: BlockShape) -> Iterator[ExteriorGeneratorSpec]:
    """Specs in generator order: scheme order, then choices lexicographically."""
    for scheme in enumerate_schemes(shape.s):
        ranges = [range(1, shape.block_sizes[k - 1] + 1) for k in scheme.singles]
        for choices in product(*ranges):
            yield ExteriorGeneratorSpec(scheme, tuple(choices))


def exterior_generator(
    field: Field, shape: BlockShape, spec: ExteriorGeneratorSpec
) -> EElement:
    """embed(gamma) ^ u_k1 ^ ... ^ u_kt."""
    pairs_only = PairingScheme(spec.scheme.pairs)
    result = embed(shape, gamma_product(field, shape.s, pairs_only))
    for k, j in zip(spec.scheme.singles, spec.choices):
        result = wedge(result, basis_vector(field, shape, k, j))
    return result


def enumerate_exterior_generators(field: Field, shape: BlockShape) -> List[EElement]:
    """All exterior generators of the annihilator, in deterministic order."""
    return [
        exterior_generator(field, shape, spec) for spec in exterior_generator_specs(shape)
    ]


def divisibility_witness(field: Field, s: int, subset: Iterable[int]) -> AElement:
    """Closed-form w with w * mu = M_K, for |K| = k > s/2 and char 0 or above k.

    With a the sum of xi_i over K and b the sum over the rest,
    (a + b) * sum_{j<k} a**(k-1-j) * (-b)**j = a**k - (-b)**k, where
    a**k = k! * M_K and (-b)**k vanishes because only s - k < k variables
    remain.
    """
    indices = sorted(set(subset))
    k = len(indices)
    if 2 * k <= s:
        raise AlgebraError(f"|K|={k} must exceed s/2 for s={s}")
    a = AElement(field, s, {1 << (i - 1): 1 for i in indices})
    minus_b = AElement(
        field, s, {1 << (i - 1): -1 for i in range(1, s + 1) if i not in indices}
    )

    beta = AElement(field, s, {})
    for j in range(k):
        beta = beta + a_multiply(a ** (k - 1 - j), minus_b**j)
    return beta.scale(field.element(field.factorial_inverse(k)))


@dataclass(frozen=True)
class DimensionLedger:
    """z_l = 2**n_l - 2, their elementary symmetric values, and the total.

    The total sum_k 2**(s-k) * e_k equals prod_l (2 + z_l) = 2**n.
    """

    z: Tuple[int, ...]
    elementary: Tuple[int, ...]
    total: int


def dimension_ledger(shape: BlockShape) -> DimensionLedger:
    """Expand prod_l (t + z_l) and read off the elementary symmetric values."""
    t = symbols("t")
    z = tuple((1 << size) - 2 for size in shape.block_sizes)
    poly = Poly(1, t)
    for value in z:
        poly = poly * Poly(t + value, t)
    elementary = tuple(int(c) for c in poly.all_coeffs())
    total = int(poly.eval(2))
    logger.debug("ledger for %s: z=%s total=%d", shape, z, total)
    return DimensionLedger(z, elementary, total)
