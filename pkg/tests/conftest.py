"""Shared fixtures: one calibrated world, one logged dataset, one CATE fit.

Everything expensive is session-scoped so the unit tests stay fast; tests
that need isolation build their own small objects instead.
"""

from __future__ import annotations

import numpy as np
import pytest

from reminq import (
    EpisodeConfig,
    SuggestionPolicy,
    collect_random_trajectories,
    default_transition_model,
    estimate_cate,
)


@pytest.fixture(scope="session")
def model():
    return default_transition_model()


@pytest.fixture(scope="session")
def episode_cfg():
    return EpisodeConfig()


@pytest.fixture(scope="session")
def dataset(model, episode_cfg):
    """Random-policy log with >50k transitions, fixed seed."""
    ds = collect_random_trajectories(model, episode_cfg, n_episodes=2600, seed=2024)
    assert len(ds) >= 50_000
    return ds


@pytest.fixture(scope="session")
def cate(dataset):
    return estimate_cate(dataset)


@pytest.fixture(scope="session")
def suggestion(cate):
    return SuggestionPolicy(cate)


@pytest.fixture()
def rng():
    return np.random.default_rng(7)
