"""Annihilators, ideal spans and minimal generators, and the verifiers.

Everything is exact linear algebra on the mask-indexed basis. mu is
homogeneous, and in E it is even and therefore central, so its annihilator
is the kernel of multiplication by mu and a two-sided ideal. Ideal spans are
closures under multiplication by the algebra generators (the xi_i in A, the
basis vectors x_j in E).
"""

import logging
import random
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

from sympy import binomial, catalan

from .exact_linalg import (
    EchelonBuilder,
    ScalarMatrix,
    SubspaceBasis,
    Vector,
    first_outside,
    kernel,
    rank,
    solve,
    span_contains,
    span_equal,
    span_within,
)
from .exterior_algebra import (
    BlockShape,
    EElement,
    blade_sign,
    decomposition_count,
    direct_sum_pieces,
    embed,
    is_even,
)
from .func_utils import repeat_func
from .generators import (
    divisibility_witness,
    dimension_ledger,
    enumerate_exterior_generators,
    enumerate_GS,
    enumerate_PS,
    exterior_generator_specs,
    half_length,
    mu_element,
    shadow,
)
from .quotient_algebra import (
    AElement,
    a_monomial,
    a_multiply,
    a_pairing,
    check_s,
    gram_matrix,
    is_permutation_matrix,
)
from .report import VerificationReport
from .scalars import AlgebraError, Field, MixedContext
from .sparse import popcount

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_MAX_AMBIENT_DIM",
    "DEFAULT_PAIRING_TRIPLES",
    "AmbientSpace",
    "AmbientTooLarge",
    "MinimalityCertificate",
    "NotDivisible",
    "NotInMaximalIdeal",
    "OddElement",
    "VerificationReport",
    "annihilator",
    "certify_minimal",
    "factor_out_mu",
    "ideal_annihilator",
    "ideal_span",
    "maximal_ideal_product",
    "minimal_generators",
    "mu_ideal_dim",
    "mult_operator",
    "verify_frobenius",
    "verify_lemma2",
    "verify_main",
    "verify_minimal",
    "verify_theorem6",
]

DEFAULT_MAX_AMBIENT_DIM = 2**14
DEFAULT_PAIRING_TRIPLES = 1000

Element = Union[AElement, EElement]


class OddElement(AlgebraError, ValueError):  # noqa: N818
    """Raised when an exterior annihilator is requested for a non-even element."""


class NotInMaximalIdeal(AlgebraError, ValueError):  # noqa: N818
    """Raised when a generator has a nonzero constant term."""


class AmbientTooLarge(AlgebraError, ValueError):  # noqa: N818
    """Raised when the ambient dimension exceeds the configured cap."""

    def __init__(self, dimension: int, limit: int) -> None:
        """Instantiate exception with the dimension and the cap."""
        self.dimension = dimension
        self.limit = limit
        super().__init__(
            f"ambient dimension {dimension} exceeds the limit of {limit}; "
            "raise --max-ambient-dim to override"
        )


@dataclass(frozen=True)
class NotDivisible:
    """Returned by `factor_out_mu` when the element is not a multiple of mu."""

    element: AElement


@dataclass(frozen=True)
class AmbientSpace:
    """A (ring mode, given s) or E (exterior mode, given a shape) over a field."""

    field: Field
    s: int
    shape: Optional[BlockShape] = None

    @classmethod
    def ring(cls, field: Field, s: int) -> "AmbientSpace":
        """The squarefree algebra in s variables."""
        return cls(field, s)

    @classmethod
    def exterior(cls, field: Field, shape: BlockShape) -> "AmbientSpace":
        """The exterior algebra of a block shape."""
        return cls(field, shape.s, shape)

    @property
    def kind(self) -> str:
        """`ring` or `exterior`."""
        return "ring" if self.shape is None else "exterior"

    @property
    def nbits(self) -> int:
        """Number of algebra generators, so the dimension is 2**nbits."""
        return self.s if self.shape is None else self.shape.n

    @property
    def dimension(self) -> int:
        """2**s or 2**n."""
        return 1 << self.nbits

    def check_size(self, limit: Optional[int] = None) -> "AmbientSpace":
        """Raise AmbientTooLarge beyond the cap."""
        cap = DEFAULT_MAX_AMBIENT_DIM if limit is None else limit
        if self.dimension > cap:
            raise AmbientTooLarge(self.dimension, cap)
        return self

    def vector(self, x: Element) -> Vector:
        """Coordinates of an element, checking it belongs here."""
        if x.field != self.field:
            raise MixedContext(f"element over {x.field} used in an ambient over {self.field}")
        if self.shape is None:
            if not isinstance(x, AElement) or x.s != self.s:
                raise MixedContext(f"{x!r} is not an element of A with s={self.s}")
        elif not isinstance(x, EElement) or x.shape != self.shape:
            raise MixedContext(f"{x!r} is not an element of E with shape {self.shape}")
        return x.vector()

    def element(self, vector: Vector) -> Element:
        """Element with the given coordinates."""
        if self.shape is None:
            return AElement(self.field, self.s, vector)
        return EElement(self.field, self.shape, vector)

    def multiply_basis(self, x: Element, mask: int) -> Vector:
        """Coordinates of x * basis[mask]."""
        field = self.field
        out: Vector = {}
        for mx, cx in x.terms():
            if mx & mask:
                continue
            value = cx
            if self.shape is not None and blade_sign(mx, mask) < 0:
                value = field.neg(value)
            target = mx | mask
            out[target] = field.add(out[target], value) if target in out else value
        return {m: v for m, v in out.items() if v != 0}

    def generator_actions(self) -> List[Callable[[Vector], Vector]]:
        """Left multiplication by each algebra generator, on coordinates."""
        field = self.field

        def action(bit: int) -> Callable[[Vector], Vector]:
            below = bit - 1

            def apply(v: Vector) -> Vector:
                out: Vector = {}
                for mask, value in v.items():
                    if mask & bit:
                        continue
                    if self.shape is not None and popcount(mask & below) & 1:
                        value = field.neg(value)
                    out[mask | bit] = value
                return out

            return apply

        return [action(1 << i) for i in range(self.nbits)]


def mult_operator(x: Element, ambient: AmbientSpace) -> ScalarMatrix:
    """Matrix whose column j holds the coordinates of x * basis_j."""
    ambient.vector(x)
    columns = [ambient.multiply_basis(x, mask) for mask in range(ambient.dimension)]
    return ScalarMatrix.from_columns(ambient.field, ambient.dimension, columns)


def annihilator(x: Element, ambient: AmbientSpace) -> SubspaceBasis:
    """Kernel of multiplication by x; x must be even in the exterior case."""
    if isinstance(x, EElement) and not is_even(x):
        raise OddElement(f"{x} is not even, so its left and right annihilators differ")
    basis = kernel(mult_operator(x, ambient))
    logger.debug("annihilator in %s-dim %s has dim %d", ambient.dimension, ambient.kind, basis.rank)
    return basis


def _closure(builder: EchelonBuilder, seeds: Sequence[Vector], ambient: AmbientSpace) -> None:
    actions = ambient.generator_actions()
    queue = deque(row for row in map(builder.add, seeds) if row is not None)
    while queue:
        row = queue.popleft()
        for act in actions:
            image = act(row)
            if image:
                new = builder.add(image)
                if new is not None:
                    queue.append(new)


def ideal_span(gens: Sequence[Element], ambient: AmbientSpace) -> SubspaceBasis:
    """The ideal generated by gens, as a subspace."""
    builder = EchelonBuilder(ambient.field, ambient.dimension)
    _closure(builder, [ambient.vector(g) for g in gens], ambient)
    logger.debug("ideal of %d generators has dim %d", len(gens), builder.rank)
    return builder.to_basis()


def ideal_annihilator(basis: SubspaceBasis, ambient: AmbientSpace) -> SubspaceBasis:
    """Annihilator of an ideal of A, as its orthogonal complement under the pairing.

    y kills the ideal exactly when B(y, v) = 0 for every v in it, and
    B(y, v) = sum_m y[m] * v[full ^ m].
    """
    if ambient.shape is not None:
        raise AlgebraError("the pairing complement is only available in ring mode")
    full = ambient.dimension - 1
    rows = [{full ^ m: v for m, v in row.items()} for row in basis.sparse_rows()]
    columns: List[Vector] = [{} for _ in range(ambient.dimension)]
    for i, row in enumerate(rows):
        for m, v in row.items():
            columns[m][i] = v
    matrix = ScalarMatrix.from_columns(ambient.field, len(rows), columns)
    return kernel(matrix)


def maximal_ideal_product(basis: SubspaceBasis, ambient: AmbientSpace) -> SubspaceBasis:
    """m * I, spanned by the generators of m times a basis of I."""
    builder = EchelonBuilder(ambient.field, ambient.dimension)
    for act in ambient.generator_actions():
        for row in basis.sparse_rows():
            image = act(row)
            if image:
                builder.add(image)
    return builder.to_basis()


@lru_cache(maxsize=None)
def _cached_mu_operator(field: Field, s: int) -> ScalarMatrix:
    return mult_operator(mu_element(field, s), AmbientSpace.ring(field, s))


def _mu_operator(field: Field, s: int, limit: Optional[int] = None) -> ScalarMatrix:
    AmbientSpace.ring(field, s).check_size(limit)
    return _cached_mu_operator(field, s)


@lru_cache(maxsize=None)
def mu_ideal_dim(m: int, field: Field) -> int:
    """dim(A mu) for the algebra in m variables (0 when m = 0)."""
    if m == 0:
        return 0
    return rank(_mu_operator(field, m))


def factor_out_mu(
    omega: AElement, max_ambient_dim: Optional[int] = None
) -> Union[AElement, NotDivisible]:
    """Some w with w * mu = omega (free variables zero), or NotDivisible.

    Raises AmbientTooLarge when 2**s exceeds `max_ambient_dim`.
    """
    field, s = omega.field, omega.s
    solution = solve(_mu_operator(field, s, max_ambient_dim), omega.vector())
    if solution is None:
        return NotDivisible(omega)
    witness = AElement(field, s, solution)
    if a_multiply(witness, mu_element(field, s)) != omega:
        raise AlgebraError(f"witness {witness} does not reproduce {omega}")
    return witness


def _check_in_maximal_ideal(gens: Sequence[Element]) -> None:
    for index, g in enumerate(gens):
        if g.coeffs.get(0):
            raise NotInMaximalIdeal(f"generator {index} ({g}) has a constant term")


def minimal_generator_indices(gens: Sequence[Element], ambient: AmbientSpace) -> List[int]:
    """Indices of a subset of gens whose images form a basis of I / mI."""
    _check_in_maximal_ideal(gens)
    ideal = ideal_span(gens, ambient)
    builder = EchelonBuilder(ambient.field, ambient.dimension)
    for row in maximal_ideal_product(ideal, ambient).sparse_rows():
        builder.add(row)
    chosen = []
    for index, g in enumerate(gens):
        if builder.add(ambient.vector(g)) is not None:
            chosen.append(index)
    return chosen


def minimal_generators(gens: Sequence[Element], ambient: AmbientSpace) -> List[Element]:
    """A minimal generating subset of gens (a lift of a basis of I / mI)."""
    return [gens[i] for i in minimal_generator_indices(gens, ambient)]


@dataclass(frozen=True)
class MinimalityCertificate:
    """Span preservation plus, per kept generator, whether removing it shrinks the span."""

    spans_ideal: bool
    removal_drops: List[bool]

    @property
    def ok(self) -> bool:
        """Both certificates hold."""
        return self.spans_ideal and all(self.removal_drops)


def certify_minimal(
    chosen: Sequence[Element], ideal: SubspaceBasis, ambient: AmbientSpace
) -> MinimalityCertificate:
    """Check that chosen generates `ideal` and that no element can be dropped."""
    spans = span_equal(ideal_span(chosen, ambient), ideal)
    drops = []
    for i in range(len(chosen)):
        rest = list(chosen[:i]) + list(chosen[i + 1 :])
        drops.append(ideal_span(rest, ambient).rank < ideal.rank)
    return MinimalityCertificate(spans, drops)


def graded_dims(basis: SubspaceBasis, top: int) -> List[int]:
    """Dimension per degree 0..top of a subspace spanned by homogeneous rows."""
    dims = [0] * (top + 1)
    for pivot in basis.pivots:
        dims[popcount(pivot)] += 1
    return dims


def _witness_entry(
    name: str, vector: Vector, ambient: AmbientSpace, mu: Element, span: SubspaceBasis
) -> Dict[str, object]:
    element = ambient.element(vector)
    product = ambient.vector(element * mu)  # type: ignore[operator]
    return {
        "equality": name,
        "witness": str(element),
        "annihilates_mu": not product,
        "outside_span": not span_contains(span, vector),
    }


def _compare(
    report: VerificationReport,
    name: str,
    larger: SubspaceBasis,
    smaller: SubspaceBasis,
    ambient: AmbientSpace,
    mu: Element,
) -> None:
    """Record span equality, with a witness from `larger` when it fails."""
    equal = span_equal(larger, smaller)
    report.equalities[name] = equal
    if not equal:
        outside = first_outside(larger, smaller)
        if outside is None:
            outside = first_outside(smaller, larger)
            larger, smaller = smaller, larger
        assert outside is not None
        report.witnesses.append(_witness_entry(name, outside, ambient, mu, smaller))


def _config(ambient: AmbientSpace, check: str) -> Dict[str, object]:
    shape = ambient.shape
    return {
        "mode": ambient.kind,
        "s": ambient.s,
        "blocks": list(shape.block_sizes) if shape else None,
        "characteristic": ambient.field.characteristic,
        "checks": [check],
    }


def _random_element(rng: random.Random, field: Field, s: int) -> AElement:
    terms = {rng.randrange(1 << s): rng.randint(-5, 5) for _ in range(rng.randint(1, 4))}
    return AElement(field, s, terms)


def verify_frobenius(
    s: int,
    field: Field,
    triples: int = DEFAULT_PAIRING_TRIPLES,
    seed: int = 0,
    max_s: Optional[int] = None,
    max_ambient_dim: Optional[int] = None,
) -> VerificationReport:
    """Gram matrix checks plus symmetry and associativity on random triples."""
    check_s(s, max_s)
    ambient = AmbientSpace.ring(field, s).check_size(max_ambient_dim)
    report = VerificationReport(_config(ambient, "frobenius"))
    gram = gram_matrix(field, s)
    size = ambient.dimension

    report.dims["gram_rank"] = rank(gram)
    report.dims["pairing_triples"] = triples
    report.equalities["gram_is_permutation"] = is_permutation_matrix(gram)
    report.equalities["gram_nondegenerate"] = report.dims["gram_rank"] == size
    report.equalities["gram_symmetric"] = all(
        gram.entry(i, j) == gram.entry(j, i) for i in range(size) for j in range(i)
    )

    rng = random.Random(seed)
    symmetric = associative = True
    sample = repeat_func(
        lambda: tuple(_random_element(rng, field, s) for _ in range(3)), times=triples
    )
    for a, b, c in sample:
        symmetric = symmetric and a_pairing(a, b) == a_pairing(b, a)
        associative = associative and (
            a_pairing(a_multiply(a, b), c) == a_pairing(a, a_multiply(b, c))
        )
    report.equalities["pairing_symmetric"] = symmetric
    report.equalities["pairing_associative"] = associative
    return report


def verify_lemma2(
    s: int,
    field: Field,
    max_s: Optional[int] = None,
    max_ambient_dim: Optional[int] = None,
) -> VerificationReport:
    """Degree-k monomials with s/2 < k <= s are multiples of mu.

    Degrees with 0 < p <= k are skipped, as 1/k! does not exist there.
    Both the solver and the closed-form witness are checked.
    """
    check_s(s, max_s)
    ambient = AmbientSpace.ring(field, s).check_size(max_ambient_dim)
    report = VerificationReport(_config(ambient, "lemma2"))
    mu = mu_element(field, s)
    p = field.characteristic

    checked = skipped = 0
    solver_ok = closed_form_ok = True
    for k in range(s // 2 + 1, s + 1):
        if p and p <= k:
            skipped += 1
            continue
        for subset in combinations(range(1, s + 1), k):
            omega = a_monomial(field, s, subset)
            checked += 1
            if isinstance(factor_out_mu(omega, max_ambient_dim), NotDivisible):
                solver_ok = False
                report.witnesses.append({
                    "equality": "monomials_divisible_by_mu",
                    "witness": str(omega),
                })
            closed_form_ok = closed_form_ok and (
                a_multiply(divisibility_witness(field, s, subset), mu) == omega
            )

    report.dims["lemma2_monomials"] = checked
    report.dims["lemma2_skipped_degrees"] = skipped
    report.equalities["monomials_divisible_by_mu"] = solver_ok
    report.equalities["closed_form_witnesses_verify"] = closed_form_ok
    return report


def verify_theorem6(
    s: int,
    field: Field,
    convention: str = "231",
    max_s: Optional[int] = None,
    max_ambient_dim: Optional[int] = None,
) -> VerificationReport:
    """Compare Ann_A(mu) with the ideals of the covering and stack-sortable families."""
    check_s(s, max_s)
    ambient = AmbientSpace.ring(field, s).check_size(max_ambient_dim)
    report = VerificationReport(_config(ambient, "theorem6"))
    report.config["stack_convention"] = convention
    mu = mu_element(field, s)
    size = ambient.dimension
    d = half_length(s)

    gs = enumerate_GS(field, s)
    ps = enumerate_PS(field, s, convention)
    mu_ideal = ideal_span([mu], ambient)
    ann = annihilator(mu, ambient)
    gs_ideal = ideal_span(gs, ambient)
    ps_ideal = ideal_span(ps, ambient)
    graded = graded_dims(ann, s)
    expected = int(binomial(s, s - d))

    report.dims.update({
        "ambient": size,
        "mu_ideal": mu_ideal.rank,
        "annihilator": ann.rank,
        "generated_ideal": gs_ideal.rank,
        "gs_ideal": gs_ideal.rank,
        "ps_ideal": ps_ideal.rank,
        "gs_count": len(gs),
        "ps_count": len(ps),
        "expected_annihilator": expected,
        "d": d,
    })
    report.graded = graded
    report.minimal = _minimal_summary(gs, gs, ambient, convention)

    eq = report.equalities
    eq["gs_annihilate_mu"] = all(not a_multiply(mu, g) for g in gs)
    eq["mu_ideal_plus_annihilator_is_ambient"] = mu_ideal.rank + ann.rank == size
    eq["gs_ideal_within_annihilator"] = span_within(gs_ideal, ann)
    _compare(report, "annihilator_equals_gs_ideal", ann, gs_ideal, ambient, mu)
    _compare(report, "annihilator_equals_ps_ideal", ann, ps_ideal, ambient, mu)
    eq["gs_ideal_plus_mu_ideal_is_ambient"] = gs_ideal.rank + mu_ideal.rank == size
    eq["annihilator_dim_matches_binomial"] = ann.rank == expected
    eq["annihilator_vanishes_below_d"] = not any(graded[:d])
    eq["graded_dims_sum"] = sum(graded) == ann.rank
    eq["annihilator_of_gs_equals_mu_ideal"] = span_equal(
        ideal_annihilator(gs_ideal, ambient), mu_ideal
    )
    eq["annihilator_equals_pairing_complement"] = span_equal(
        ideal_annihilator(mu_ideal, ambient), ann
    )
    return report


def _pattern_candidates(
    field: Field, s: int, shadows: Sequence[AElement], convention: str
) -> List[int]:
    """Positions whose A-shadow is +- a stack-sortable polynomial."""
    family = set()
    for poly in enumerate_PS(field, s, convention):
        family.add(poly)
        family.add(-poly)
    return [i for i, shade in enumerate(shadows) if shade in family]


def _exterior_shadows(field: Field, shape: BlockShape) -> List[AElement]:
    return [shadow(field, shape.s, spec.scheme) for spec in exterior_generator_specs(shape)]


def _minimal_summary(
    gens: Sequence[Element],
    shadows: Sequence[AElement],
    ambient: AmbientSpace,
    convention: str,
) -> Dict[str, Any]:
    """Minimal generator indices, with those whose shadow is stack-sortable."""
    indices = minimal_generator_indices(gens, ambient)
    candidates = _pattern_candidates(
        ambient.field, ambient.s, [shadows[i] for i in indices], convention
    )
    return {
        "count": len(indices),
        "indices": indices,
        "pattern_candidates": [indices[i] for i in candidates],
    }


def verify_minimal(
    ambient: AmbientSpace,
    convention: str = "231",
    max_ambient_dim: Optional[int] = None,
) -> VerificationReport:
    """Minimal generators of the covering family's ideal, with certificates."""
    ambient.check_size(max_ambient_dim)
    report = VerificationReport(_config(ambient, "minimal"))
    field, s = ambient.field, ambient.s
    if ambient.shape is None:
        gens: Sequence[Element] = enumerate_GS(field, s)
        shadows = list(gens)
    else:
        gens = enumerate_exterior_generators(field, ambient.shape)
        shadows = _exterior_shadows(field, ambient.shape)

    summary = _minimal_summary(gens, shadows, ambient, convention)
    indices = summary["indices"]
    chosen = [gens[i] for i in indices]
    certificate = certify_minimal(chosen, ideal_span(gens, ambient), ambient)
    report.equalities["minimal_spans_ideal"] = certificate.spans_ideal
    report.equalities["minimal_removal_drops_span"] = all(certificate.removal_drops)
    if ambient.shape is None:
        expected = int(catalan(half_length(s)))
        summary["expected"] = expected
        report.equalities["minimal_count_matches_catalan"] = len(indices) == expected
    report.minimal = summary
    return report


def verify_main(
    shape: BlockShape,
    field: Field,
    max_ambient_dim: Optional[int] = None,
    convention: str = "231",
) -> VerificationReport:
    """Compare Ann_E(mu) with the ideal of the exterior generators."""
    ambient = AmbientSpace.exterior(field, shape).check_size(max_ambient_dim)
    report = VerificationReport(_config(ambient, "main"))
    size = ambient.dimension
    mu = embed(shape, mu_element(field, shape.s))

    gens = enumerate_exterior_generators(field, shape)
    mu_ideal = ideal_span([mu], ambient)
    ann = annihilator(mu, ambient)
    generated = ideal_span(gens, ambient)
    ledger = dimension_ledger(shape)

    pieces = list(direct_sum_pieces(shape))
    split_mu = sum(mu_ideal_dim(len(piece.free), field) for piece in pieces)
    split_ann = sum(
        piece.dimension - mu_ideal_dim(len(piece.free), field) for piece in pieces
    )

    report.dims.update({
        "ambient": size,
        "mu_ideal": mu_ideal.rank,
        "annihilator": ann.rank,
        "generated_ideal": generated.rank,
        "generator_count": len(gens),
        "decomposition_pieces": len(pieces),
        "decomposition_mu_ideal": split_mu,
        "decomposition_annihilator": split_ann,
    })
    report.ledger = {
        "z": list(ledger.z),
        "elementary": list(ledger.elementary),
        "total": ledger.total,
    }
    shadows = _exterior_shadows(field, shape)
    report.minimal = _minimal_summary(gens, shadows, ambient, convention)

    eq = report.equalities
    eq["generators_annihilate_mu"] = all(not ambient.vector(mu * g) for g in gens)
    _compare(report, "annihilator_equals_generated_ideal", ann, generated, ambient, mu)
    eq["generated_within_annihilator"] = span_within(generated, ann)
    eq["mu_ideal_plus_annihilator_is_ambient"] = mu_ideal.rank + ann.rank == size
    eq["generated_plus_mu_ideal_is_ambient"] = generated.rank + mu_ideal.rank == size
    eq["ledger_total_is_ambient"] = ledger.total == size == decomposition_count(shape)
    eq["decomposition_matches_mu_ideal"] = split_mu == mu_ideal.rank
    eq["decomposition_matches_annihilator"] = split_ann == ann.rank
    return report

