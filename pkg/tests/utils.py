"""Test utilities here."""

import random
from itertools import combinations, permutations
from typing import Dict, List, Sequence, Tuple

from neat_ann.exact_linalg import ScalarMatrix
from neat_ann.exterior_algebra import BlockShape, EElement
from neat_ann.quotient_algebra import AElement
from neat_ann.scalars import Field


def random_a_element(
    rng: random.Random, field: Field, s: int, terms: int = 4
) -> AElement:
    """Sparse random element of A with small integer coefficients."""
    coeffs = {rng.randrange(1 << s): rng.randint(-4, 4) for _ in range(terms)}
    return AElement(field, s, coeffs)


def random_e_element(
    rng: random.Random, field: Field, shape: BlockShape, terms: int = 4
) -> EElement:
    """Sparse random multivector."""
    coeffs = {rng.randrange(1 << shape.n): rng.randint(-4, 4) for _ in range(terms)}
    return EElement(field, shape, coeffs)


def homogeneous_e_element(
    rng: random.Random, field: Field, shape: BlockShape, degree: int
) -> EElement:
    """Random multivector whose blades all have the given degree."""
    masks = [
        sum(1 << b for b in combo) for combo in combinations(range(shape.n), degree)
    ]
    chosen = rng.sample(masks, min(3, len(masks)))
    return EElement(field, shape, {m: rng.randint(1, 4) for m in chosen})


def random_matrix(
    rng: random.Random, field: Field, rows: int, cols: int, density: float = 0.5
) -> ScalarMatrix:
    """Random matrix with entries in -3..3."""
    data = [
        [rng.randint(-3, 3) if rng.random() < density else 0 for _ in range(cols)]
        for _ in range(rows)
    ]
    return ScalarMatrix.from_rows(field, data, cols=cols)


def contains_pattern(perm: Sequence[int], pattern: Tuple[int, int, int]) -> bool:
    """Whether perm has a length-3 subsequence in the same relative order."""
    for i, j, k in combinations(range(len(perm)), 3):
        triple = (perm[i], perm[j], perm[k])
        ranks = tuple(sorted(triple).index(v) + 1 for v in triple)
        if ranks == pattern:
            return True
    return False


def pattern_avoiders(d: int, pattern: Tuple[int, int, int]) -> List[Tuple[int, ...]]:
    """Brute-force filter over all permutations of 1..d."""
    return [
        p for p in permutations(range(1, d + 1)) if not contains_pattern(p, pattern)
    ]


def as_dict(element: AElement) -> Dict[int, object]:
    """Plain coefficient dict of an element."""
    return dict(element.coeffs)
