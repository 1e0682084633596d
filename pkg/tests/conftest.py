import numpy as np
import pytest

from mgmarket import HomogeneousCoupling, ModelConfig


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def small_config(**overrides) -> ModelConfig:
    """Desk-scale configuration for fast engine tests."""
    base = dict(
        n_agents=51,
        memory=1,
        n_strategies=2,
        horizon=120,
        initial_price=2000.0,
        a=(1.0, 1.0),
        coupling=HomogeneousCoupling(0.5, 0.5),
        n_runs=3,
        master_seed=321,
    )
    base.update(overrides)
    return ModelConfig(**base)
