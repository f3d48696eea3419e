"""Test fixtures."""

import random

import pytest

from neat_ann.scalars import QQ, Field, field_make

SWEEP_CHARACTERISTICS = (0, 2, 3, 5, 7, 11)


@pytest.fixture
def qq() -> Field:
    """The rationals."""
    return QQ


@pytest.fixture(params=SWEEP_CHARACTERISTICS, ids=lambda p: f"char{p}")
def field(request: pytest.FixtureRequest) -> Field:
    """Every characteristic of the acceptance sweep."""
    return field_make(request.param)


@pytest.fixture
def rng() -> random.Random:
    """Seeded generator so property checks are reproducible."""
    return random.Random(20240611)
