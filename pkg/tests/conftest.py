import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `oracle` importable

from trendgame import DirectedNetwork, GameConfig, GeneratorParams, generate
from trendgame.dynamics import derive_seed

# master seed for every deterministic fixture in the suite
SUITE_SEED = 2026


@pytest.fixture(scope="session")
def desk_networks() -> list[DirectedNetwork]:
    """The ten generated networks used by the campaign-scale tests."""
    return [
        generate(GeneratorParams(rng_seed=derive_seed(SUITE_SEED, "network", i)))
        for i in range(10)
    ]


@pytest.fixture()
def mutual_pair_config() -> GameConfig:
    """Two agents observing each other, domain {0..9}."""
    net = DirectedNetwork(2, ((1,), (0,)))
    return GameConfig(n_agents=2, dims=1, lo=0, hi=9, uniqueness_weight="3/2", network=net)
