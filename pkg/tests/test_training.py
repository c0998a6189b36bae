"""Mixed-policy training loop and its schedule."""

from __future__ import annotations

import numpy as np
import pytest

from reminq import (
    N_ACTIONS,
    N_STATES,
    CateTable,
    Method,
    MethodConfig,
    MixedWeights,
    QTable,
    SuggestionPolicy,
    mixed_select,
    train,
    weight_schedule,
)


def test_method_values():
    assert [m.value for m in Method] == ["rl", "dag", "crl-static", "crl-dynamic"]
    assert Method("crl-static") is Method.CRL_STATIC


def test_mixed_weights_validation():
    MixedWeights(0.9, 0.0, 0.1)
    with pytest.raises(ValueError):
        MixedWeights(0.9, 0.2, 0.1)  # sums past one
    with pytest.raises(ValueError):
        MixedWeights(-0.1, 1.0, 0.1)


def test_static_schedules_are_flat():
    for epoch in (0, 7, 99):
        assert weight_schedule(Method.RL, epoch, 100) == MixedWeights(0.9, 0.0, 0.1)
        assert weight_schedule(Method.DAG, epoch, 100) == MixedWeights(0.0, 0.9, 0.1)
        assert weight_schedule(Method.CRL_STATIC, epoch, 100) == MixedWeights(
            0.45, 0.45, 0.1
        )


def test_dynamic_schedule_endpoints_exact():
    first = weight_schedule(Method.CRL_DYNAMIC, 0, 800)
    last = weight_schedule(Method.CRL_DYNAMIC, 799, 800)
    assert (first.w_rl, first.w_dag, first.w_explore) == (0.2, 0.7, 0.1)
    assert (last.w_rl, last.w_dag, last.w_explore) == (0.7, 0.2, 0.1)
    mid = weight_schedule(Method.CRL_DYNAMIC, 400, 801)
    assert mid.w_rl == pytest.approx(0.45)
    assert mid.w_dag == pytest.approx(0.45)


def test_dynamic_schedule_single_epoch():
    only = weight_schedule(Method.CRL_DYNAMIC, 0, 1)
    assert (only.w_rl, only.w_dag) == (0.2, 0.7)


def test_schedule_rejects_bad_epoch():
    with pytest.raises(ValueError):
        weight_schedule(Method.RL, 100, 100)
    with pytest.raises(ValueError):
        weight_schedule(Method.RL, -1, 100)


def test_method_config_validation():
    with pytest.raises(ValueError):
        MethodConfig(Method.RL, epochs=0)
    with pytest.raises(ValueError):
        MethodConfig(Method.RL, persistence_k=0)
    cfg = MethodConfig("dag")
    assert cfg.method is Method.DAG


class _ScriptedRng:
    def __init__(self, vals):
        self.vals = list(vals)

    def random(self):
        return self.vals.pop(0)


def _policy_with(cell_effects):
    effects = np.zeros((N_STATES, N_ACTIONS))
    counts = np.full((N_STATES, N_ACTIONS), 100, dtype=np.int64)
    avail = np.ones((N_STATES, N_ACTIONS), dtype=bool)
    for (s, a), v in cell_effects.items():
        effects[s, a] = v
    return SuggestionPolicy(CateTable(effects, counts, avail))


def test_mixed_select_branches():
    w = MixedWeights(0.5, 0.3, 0.2)
    q = QTable.zeros()
    q.q[0, 1] = 1.0
    policy = _policy_with({(0, 4): 2.0})

    # coin in the RL band, then the epsilon draw exploits
    rng = _ScriptedRng([0.4, 0.9])
    assert mixed_select(w, q, policy, 0, 0.1, rng) == 1
    # coin in the DAG band: no further draws
    rng = _ScriptedRng([0.7])
    assert mixed_select(w, q, policy, 0, 0.1, rng) == 4
    assert rng.vals == []
    # coin in the random band: one more uniform picks among six
    rng = _ScriptedRng([0.95, 0.5])
    assert mixed_select(w, q, policy, 0, 0.1, rng) == 3


def test_train_requires_suggestion_for_guided_methods(model):
    cfg = MethodConfig(Method.DAG, epochs=1, episodes_per_epoch=1)
    with pytest.raises(ValueError):
        train(model, cfg, None, seed=1)


def test_train_is_deterministic(model, suggestion):
    cfg = MethodConfig(Method.CRL_STATIC, epochs=3, episodes_per_epoch=4)
    q1, log1 = train(model, cfg, suggestion, seed=5)
    q2, log2 = train(model, cfg, suggestion, seed=5)
    q3, _ = train(model, cfg, suggestion, seed=6)
    assert np.array_equal(q1.q, q2.q)
    assert np.array_equal(log1.returns, log2.returns)
    assert np.array_equal(log1.snapshots, log2.snapshots)
    assert not np.array_equal(q1.q, q3.q)


def test_train_log_shapes(model, suggestion):
    cfg = MethodConfig(Method.CRL_DYNAMIC, epochs=4, episodes_per_epoch=3)
    q, log = train(model, cfg, suggestion, seed=2)
    assert log.returns.shape == (4, 3)
    assert log.lengths.shape == (4, 3)
    assert log.snapshots.shape == (4, N_STATES, N_ACTIONS)
    assert log.method is Method.CRL_DYNAMIC
    assert log.seed == 2
    assert np.array_equal(log.final_qtable().q, q.q)
    assert np.array_equal(log.snapshots[-1], q.q)


def test_pure_rl_ignores_suggestion(model, suggestion):
    cfg = MethodConfig(Method.RL, epochs=2, episodes_per_epoch=3)
    q_with, _ = train(model, cfg, suggestion, seed=7)
    q_without, _ = train(model, cfg, None, seed=7)
    assert np.array_equal(q_with.q, q_without.q)


def test_train_log_csv_format(model, suggestion, tmp_path):
    cfg = MethodConfig(Method.RL, epochs=2, episodes_per_epoch=2)
    _, log = train(model, cfg, None, seed=1)
    path = tmp_path / "log.csv"
    log.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "epoch,episode,return,length"
    assert len(lines) == 1 + 4
    first = lines[1].split(",")
    assert (first[0], first[1]) == ("1", "1")
    assert float(first[2]) == log.returns[0, 0]
    assert int(first[3]) == log.lengths[0, 0]


def test_episode_lengths_respect_cap(model, suggestion):
    cfg = MethodConfig(Method.CRL_STATIC, epochs=5, episodes_per_epoch=10)
    _, log = train(model, cfg, suggestion, seed=3)
    assert log.lengths.max() <= 50
    assert log.lengths.min() >= 1
