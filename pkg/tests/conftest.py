import dataclasses
import math

import pytest

from orbitfed.scenario import (
    ConstellationConfig,
    DatasetConfig,
    GroundStationConfig,
    Scenario,
    TrainingSection,
)
from orbitfed.sim_runner import SimContext, run_fedleo, run_star_baseline

import oracles

# altitude whose period equals one Earth rotation, so an equatorial satellite
# above a GS on the equator stays at the zenith
SYNC_ALTITUDE = (oracles.MU / oracles.OMEGA_E**2) ** (1 / 3) - oracles.R_E


def fast(scenario: Scenario, epochs: int = 2) -> Scenario:
    return dataclasses.replace(scenario, training=dataclasses.replace(scenario.training, local_epochs=epochs))


def always_visible_scenario(**overrides) -> Scenario:
    sc = Scenario(
        horizon_s=20_000.0,
        max_rounds=4,
        target_accuracy=1.0,
        partition="iid",
        constellation=ConstellationConfig(1, 1, SYNC_ALTITUDE, 0.0, 0.0, 1),
        ground_station=GroundStationConfig("equator", 0.0, 0.0, 0.0),
        training=TrainingSection(local_epochs=3),
        dataset=DatasetConfig(num_samples=300, num_features=4, num_classes=3, separation=2.0),
    )
    return dataclasses.replace(sc, **overrides).validate()


@pytest.fixture(scope="session")
def default_fast_ctx():
    return SimContext.from_scenario(fast(Scenario(target_accuracy=1.0)).validate())


@pytest.fixture(scope="session")
def default_fast_runs(default_fast_ctx):
    return run_fedleo(default_fast_ctx), run_star_baseline(default_fast_ctx)


@pytest.fixture(scope="session")
def sync_ctx():
    return SimContext.from_scenario(always_visible_scenario())


def finite(x):
    return x is not None and math.isfinite(x)
