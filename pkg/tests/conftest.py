import math
import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=100,
    suppress_health_check=[HealthCheck.too_slow],
    print_blob=True,
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return random.Random(0xD15C)


def random_point(rand, min_depth=1e-3):
    """Log-uniform depth, uniform angle; shared sampling helper."""
    from harminterp.disc import DiscPoint

    depth = 10.0 ** rand.uniform(math.log10(min_depth), 0.0)
    return DiscPoint(rand.uniform(0.0, 2.0 * math.pi), min(depth, 1.0))
