"""Shared fixtures: small deterministic scenarios and config builders."""

import numpy as np
import pytest

from lsfp.config import SimulationConfig
from lsfp.scenario import generate_scenario
from lsfp.stats import compute_statistics


def make_config(**overrides) -> SimulationConfig:
    """Default config with overrides; tau_p tracks K unless given explicitly."""
    d = SimulationConfig().to_dict()
    d.update(overrides)
    if "tau_p" not in overrides:
        d["tau_p"] = d["K"]
    return SimulationConfig.from_dict(d)


def toy_config(**overrides) -> SimulationConfig:
    """Small L=2, K=2, M=4 network that keeps closed-form checks cheap."""
    base = dict(L=2, K=2, M=4, cell_side=100.0, min_bs_distance=15.0, seed=3)
    base.update(overrides)
    return make_config(**base)


@pytest.fixture(scope="session")
def toy_scenario():
    return generate_scenario(toy_config(), setup_index=0)


@pytest.fixture(scope="session")
def toy_stats(toy_scenario):
    return compute_statistics(toy_scenario)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
