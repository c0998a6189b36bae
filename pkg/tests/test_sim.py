"""Transition model and session mechanics."""

from __future__ import annotations

import json

import numpy as np
import pytest

from reminq import (
    N_ACTIONS,
    N_STATES,
    DoneReason,
    EpisodeConfig,
    PatientEnv,
    TransitionModel,
    default_transition_model,
    forced_give_choice,
    sample_next_state,
)
from reminq.mdp import START_STATE
from reminq.sim import EpisodeDoneError, EpisodeStatus


def test_default_model_is_row_stochastic(model):
    assert model.probs.shape == (N_STATES, N_ACTIONS, N_STATES)
    sums = model.probs.sum(axis=2)
    assert np.allclose(sums, 1.0, atol=1e-12)
    assert np.all(model.probs >= 0.0)


def test_model_rejects_bad_tables():
    with pytest.raises(ValueError):
        TransitionModel(np.zeros((N_STATES, N_ACTIONS, N_STATES)))
    bad = np.full((N_STATES, N_ACTIONS, N_STATES), 1.0 / N_STATES)
    bad[0, 0, 0] = -0.1
    with pytest.raises(ValueError):
        TransitionModel(bad)
    with pytest.raises(ValueError):
        TransitionModel(np.full((N_STATES, N_ACTIONS, 17), 1.0 / 17))


def test_model_json_roundtrip(tmp_path, model):
    path = tmp_path / "model.json"
    model.save(path)
    back = TransitionModel.load(path)
    assert np.array_equal(back.probs, model.probs)
    payload = json.loads(path.read_text())
    assert set(payload) == {"probs"}


def test_default_model_seed_and_strength():
    a = default_transition_model(seed=0)
    b = default_transition_model(seed=0)
    c = default_transition_model(seed=1)
    assert np.array_equal(a.probs, b.probs)
    assert not np.array_equal(a.probs, c.probs)
    flat = default_transition_model(strength=0.0)
    assert np.allclose(flat.probs, 1.0 / N_STATES)


def test_sample_next_state_is_deterministic_per_stream(model):
    r1 = np.random.default_rng(5)
    r2 = np.random.default_rng(5)
    for a in range(N_ACTIONS):
        s1 = sample_next_state(model, START_STATE, a, r1)
        s2 = sample_next_state(model, START_STATE, a, r2)
        assert s1 == s2


def test_episode_config_validation():
    cfg = EpisodeConfig()
    assert (cfg.max_rounds, cfg.total_triggers, cfg.persistence_k, cfg.earlystop_m) == (
        50,
        5,
        2,
        3,
    )
    with pytest.raises(ValueError):
        EpisodeConfig(max_rounds=0)
    with pytest.raises(ValueError):
        EpisodeConfig(total_triggers=-1)
    with pytest.raises(ValueError):
        EpisodeConfig(earlystop_m=0)


def test_env_replays_with_fixed_seed(model):
    env = PatientEnv(model)
    env.reset(seed=11)
    first = [env.step(a % 6) for a in range(10)]
    env.reset(seed=11)
    second = [env.step(a % 6) for a in range(10)]
    assert first == second


def test_env_raises_after_done(model):
    env = PatientEnv(model, config=EpisodeConfig(max_rounds=3))
    env.reset(seed=1)
    done = False
    for _ in range(3):
        _, _, done, _ = env.step(0)
        if done:
            break
    assert done
    with pytest.raises(EpisodeDoneError):
        env.step(0)


def test_env_rejects_out_of_range_action(model):
    env = PatientEnv(model)
    env.reset(seed=0)
    with pytest.raises(ValueError):
        env.step(7)


def test_round_cap_reason(model):
    # A patient that never talks: identity rows pinned at the start state.
    probs = np.zeros((N_STATES, N_ACTIONS, N_STATES))
    probs[:, :, START_STATE.index()] = 1.0
    env = PatientEnv(TransitionModel(probs), config=EpisodeConfig(max_rounds=4))
    env.reset(seed=0)
    rounds = 0
    done = False
    while not done:
        _, _, done, _ = env.step(0)
        rounds += 1
    assert rounds == 4
    assert env.status.done_reason is DoneReason.ROUND_CAP


def test_all_triggers_ends_session(model):
    # A patient that always answers on topic: triggers burn down in
    # total_triggers rounds and the goal flag fires on the last one.
    relevant = 14  # RR_Neu_No: on topic without building a distress streak
    probs = np.zeros((N_STATES, N_ACTIONS, N_STATES))
    probs[:, :, relevant] = 1.0
    cfg = EpisodeConfig(max_rounds=50, total_triggers=3)
    env = PatientEnv(TransitionModel(probs), config=cfg)
    env.reset(seed=0)
    flags_seen = []
    done = False
    while not done:
        _, _, done, flags = env.step(1)
        flags_seen.append(flags)
    assert len(flags_seen) == 3
    assert all(f.new_trigger for f in flags_seen)
    assert flags_seen[-1].goal_reached
    assert env.status.done_reason is DoneReason.ALL_TRIGGERS


def test_early_stop_fires_on_persistent_distress():
    # A patient stuck silent, upset and confused: the distress streak hits
    # earlystop_m before the round cap.
    stuck = 1  # NR_Neg_Yes
    probs = np.zeros((N_STATES, N_ACTIONS, N_STATES))
    probs[:, :, stuck] = 1.0
    cfg = EpisodeConfig(max_rounds=50, earlystop_m=3)
    env = PatientEnv(TransitionModel(probs), config=cfg)
    env.reset(seed=0)
    rewards = []
    done = False
    while not done:
        _, r, done, flags = env.step(0)
        rewards.append(r)
    assert len(rewards) == 3
    assert flags.early_stop
    assert env.status.done_reason is DoneReason.EARLY_STOP
    assert rewards[-1] < -190.0


def test_forced_give_choice_threshold():
    assert not forced_give_choice(EpisodeStatus(neg_streak=1, conf_streak=1), 2)
    assert forced_give_choice(EpisodeStatus(neg_streak=2), 2)
    assert forced_give_choice(EpisodeStatus(conf_streak=2), 2)


def test_status_is_a_copy(model):
    env = PatientEnv(model)
    env.reset(seed=3)
    before = env.status
    env.step(0)
    assert env.status.round == before.round + 1
    assert before.round == 0
