import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from manetsim import WorldConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def small_world(**overrides) -> WorldConfig:
    """A quick 40-agent world that congests at modest generation rates."""
    params = dict(
        n_agents=40,
        side_length=4.0,
        speed=0.1,
        radius=0.8,
        capacity=1,
        gen_rate=2,
        rng_seed=77,
        transient_steps=30,
        measure_steps=120,
    )
    params.update(overrides)
    return WorldConfig(**params)


@pytest.fixture
def small_config():
    return small_world()
