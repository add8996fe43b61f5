import random

import pytest

from iwaheights.iwalg import IwasawaPoly, RingSpec


@pytest.fixture
def spec31():
    """p = 3, k = 1, generous cap."""
    return RingSpec(3, 1, 12)


@pytest.fixture
def spec32():
    """p = 3, k = 2, generous cap."""
    return RingSpec(3, 2, 12)


def random_poly(rng: random.Random, spec: RingSpec, precision=None) -> IwasawaPoly:
    if precision is None:
        precision = spec.cap
    return IwasawaPoly(
        spec, [rng.randrange(spec.modulus) for _ in range(precision + 1)], precision
    )
