"""Conditional independence testing and constraint-based structure search."""

from __future__ import annotations

import json
import warnings

import numpy as np
import pytest
from scipy.stats import chi2_contingency

from reminq import CausalGraph, Dataset, g_test_ci, pc_learn
from reminq.discovery import TIERS, VARIABLES, discretize_reward
from synthgraph import TRUE_SKELETON, planted_dataset


def test_variable_set_and_tiers():
    assert VARIABLES == ("rp_t", "e_t", "c_t", "a_t", "rp_t1", "e_t1", "c_t1", "reward")
    assert all(TIERS[v] == 0 for v in VARIABLES[:4])
    assert all(TIERS[v] == 1 for v in VARIABLES[4:])


def test_discretize_reward_quantile_bins():
    vals = np.arange(9, dtype=np.float64)
    bins = discretize_reward(vals, 3)
    assert list(bins) == [0, 0, 0, 1, 1, 1, 2, 2, 2]
    with pytest.raises(ValueError):
        discretize_reward(vals, 0)


def test_g_statistic_matches_reference(dataset):
    res = g_test_ci(dataset, "rp_t", "rp_t1")
    obs = np.zeros((3, 3))
    for i, j in zip(dataset.column("rp_t"), dataset.column("rp_t1")):
        obs[i, j] += 1
    ref = chi2_contingency(obs, correction=False, lambda_="log-likelihood")
    assert res.g_stat == pytest.approx(ref.statistic, rel=1e-10)
    assert res.p_value == pytest.approx(ref.pvalue, rel=1e-9, abs=1e-300)
    assert res.dof == ref.dof


def test_conditional_g_sums_over_strata(dataset):
    res = g_test_ci(dataset, "rp_t", "rp_t1", z=("c_t",))
    g_sum, dof_sum = 0.0, 0
    c = np.asarray(dataset.column("c_t"))
    x = np.asarray(dataset.column("rp_t"))
    y = np.asarray(dataset.column("rp_t1"))
    for level in (0, 1):
        m = c == level
        obs = np.zeros((3, 3))
        for i, j in zip(x[m], y[m]):
            obs[i, j] += 1
        ref = chi2_contingency(obs, correction=False, lambda_="log-likelihood")
        g_sum += ref.statistic
        dof_sum += ref.dof
    assert res.g_stat == pytest.approx(g_sum, rel=1e-10)
    assert res.dof == dof_sum


def test_ci_detects_dependence_and_independence():
    ds = planted_dataset(0, 8000)
    dep = g_test_ci(ds, "c_t", "c_t1")
    assert not dep.independent
    ind = g_test_ci(ds, "e_t", "c_t1")
    assert ind.independent
    # chain link vanishes given the mediator
    chain = g_test_ci(ds, "rp_t", "reward", z=("rp_t1", "a_t"))
    assert chain.independent


def test_ci_low_power_guard():
    # 18 records against a conditioning set with dozens of cells: the test
    # must refuse to reject rather than report a spurious finding.
    rng = np.random.default_rng(0)
    codes = np.column_stack(
        [
            rng.integers(0, 3, 18),
            rng.integers(-1, 2, 18),
            rng.integers(0, 2, 18),
            rng.integers(0, 7, 18),
            rng.integers(0, 3, 18),
            rng.integers(-1, 2, 18),
            rng.integers(0, 2, 18),
            rng.integers(0, 7, 18),
        ]
    ).astype(np.int16)
    ds = Dataset(codes, rng.random(18), np.array([0, 18]))
    res = g_test_ci(ds, "rp_t", "rp_t1", z=("a_t",))
    assert res.independent
    assert res.low_power


def test_ci_rejects_duplicate_names(dataset):
    with pytest.raises(ValueError):
        g_test_ci(dataset, "rp_t", "rp_t")
    with pytest.raises(ValueError):
        g_test_ci(dataset, "rp_t", "e_t", z=("rp_t",))


def test_graph_tier_validation():
    CausalGraph(directed=[("a_t", "reward")], undirected=[("rp_t1", "e_t1")])
    with pytest.raises(ValueError):
        CausalGraph(directed=[("reward", "a_t")])
    with pytest.raises(ValueError):
        CausalGraph(directed=[("rp_t", "e_t")])  # same tier needs undirected
    with pytest.raises(ValueError):
        CausalGraph(undirected=[("a_t", "reward")])  # cross tier must point
    with pytest.raises(ValueError):
        CausalGraph(directed=[("a_t", "a_t")])
    with pytest.raises(ValueError):
        CausalGraph(directed=[("a_t", "nope")])


def test_graph_json_roundtrip(tmp_path):
    g = CausalGraph(
        directed=[("a_t", "reward"), ("rp_t", "rp_t1")],
        undirected=[("rp_t1", "reward")],
    )
    path = tmp_path / "graph.json"
    g.save(path)
    back = CausalGraph.load(path)
    assert back.directed == g.directed
    assert back.undirected == g.undirected
    assert back.tiers == g.tiers
    payload = json.loads(path.read_text())
    assert {"nodes", "tiers", "directed", "undirected"} <= set(payload)


def test_pc_recovers_planted_skeleton():
    ds = planted_dataset(1, 8000)
    g = pc_learn(ds)
    assert g.skeleton() == set(TRUE_SKELETON)
    for a, b in g.directed:
        assert g.tiers[a] < g.tiers[b]
    # the within-tier link cannot be oriented by time alone
    assert ("reward", "rp_t1") in g.undirected


def test_pc_isolates_constant_columns():
    ds = planted_dataset(2, 4000)
    codes = ds.codes.copy()
    codes[:, 2] = 0  # freeze confusion to a single level
    frozen = Dataset(codes, ds.rewards, np.array([0, len(ds)]))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        g = pc_learn(frozen)
    assert any("c_t" in str(w.message) for w in caught)
    assert all("c_t" not in edge for edge in g.skeleton() for edge in edge)
    assert not any("c_t" in e for e in map(tuple, g.directed))
