import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lacvar import GridFunction, parse_sequence

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=int(os.environ.get("LACVAR_HYP_EXAMPLES", "60")),
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
    print_blob=True,
)
settings.load_profile("suite")


@pytest.fixture
def dyadic13():
    return parse_sequence("geometric:1:2:13")


@pytest.fixture
def step_fn():
    def build(seed: int = 0, cells: int = 32, x0: float = 0.0, length: float = 1.0):
        rng = np.random.default_rng(seed)
        return GridFunction(x0, length / cells, rng.uniform(-1.0, 1.0, size=cells))

    return build
