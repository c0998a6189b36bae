"""Per-state treatment effect estimation and the suggestion rule."""

from __future__ import annotations

import json

import numpy as np
import pytest

from reminq import (
    ACTION_LABELS,
    N_ACTIONS,
    N_STATES,
    STATE_LABELS,
    CateTable,
    SuggestionPolicy,
    estimate_cate,
    suggest_action,
    suggestion_array,
)


from reference import brute_force_cate


def test_estimator_matches_brute_force(dataset, cate):
    effects, counts, avail = brute_force_cate(dataset)
    assert np.array_equal(cate.counts, counts)
    assert np.array_equal(cate.available, avail)
    # same grouping, same record order, same arithmetic: bit for bit
    assert np.array_equal(cate.effects[avail], effects[avail])


def test_baseline_effect_is_zero(cate):
    for s in range(N_STATES):
        if cate.available[s, 0]:
            assert cate.effects[s, 0] == 0.0


def test_cell_accessor(cate):
    eff, cnt = cate.cell(2, 1)
    assert cnt == cate.counts[2, 1]
    assert eff == cate.effects[2, 1]
    empty = CateTable(
        np.zeros((N_STATES, N_ACTIONS)),
        np.zeros((N_STATES, N_ACTIONS), dtype=np.int64),
        np.zeros((N_STATES, N_ACTIONS), dtype=bool),
    )
    eff, cnt = empty.cell(0, 0)
    assert eff is None
    assert cnt == 0


def test_table_shape_validation():
    with pytest.raises(ValueError):
        CateTable(
            np.zeros((N_STATES, 6)),
            np.zeros((N_STATES, N_ACTIONS), dtype=np.int64),
            np.zeros((N_STATES, N_ACTIONS), dtype=bool),
        )


def test_json_roundtrip_preserves_cells(tmp_path, cate):
    path = tmp_path / "cate.json"
    cate.save(path)
    back = CateTable.load(path)
    assert np.array_equal(back.counts, cate.counts)
    assert np.array_equal(back.available, cate.available)
    assert np.allclose(back.effects, cate.effects)
    payload = json.loads(path.read_text())
    assert payload["baseline"] == ACTION_LABELS[0]
    assert set(payload["states"]) == set(STATE_LABELS)
    row = payload["states"][STATE_LABELS[2]]
    assert set(row) == set(ACTION_LABELS)
    assert set(row[ACTION_LABELS[1]]) == {"avg_effect", "count"}


def test_json_unavailable_cells_are_null(cate):
    payload = json.loads(cate.to_json())
    for s, label in enumerate(STATE_LABELS):
        for a, alabel in enumerate(ACTION_LABELS):
            cell = payload["states"][label][alabel]
            if cate.available[s, a]:
                assert cell["avg_effect"] == pytest.approx(cate.effects[s, a])
            else:
                assert cell["avg_effect"] is None


def test_json_extra_keys_pass_through():
    table = CateTable(
        np.zeros((N_STATES, N_ACTIONS)),
        np.full((N_STATES, N_ACTIONS), 5, dtype=np.int64),
        np.ones((N_STATES, N_ACTIONS), dtype=bool),
        extras={STATE_LABELS[2]: {"note": "hand built"}},
    )
    back = CateTable.from_json(table.to_json())
    assert back.extras == {STATE_LABELS[2]: {"note": "hand built"}}


def _table(effect_cells, count=100):
    effects = np.zeros((N_STATES, N_ACTIONS))
    counts = np.full((N_STATES, N_ACTIONS), count, dtype=np.int64)
    avail = np.ones((N_STATES, N_ACTIONS), dtype=bool)
    for (s, a), v in effect_cells.items():
        effects[s, a] = v
    return CateTable(effects, counts, avail)


def test_suggestion_picks_best_positive_effect():
    table = _table({(4, 2): 1.5, (4, 3): 2.5, (4, 5): 0.4})
    policy = SuggestionPolicy(table)
    assert suggest_action(policy, 4) == 3


def test_suggestion_requires_strictly_positive_effect():
    table = _table({(4, 2): 0.0, (4, 3): -1.0})
    policy = SuggestionPolicy(table)
    assert suggest_action(policy, 4) == 0


def test_suggestion_ties_break_low():
    table = _table({(4, 2): 1.5, (4, 4): 1.5})
    policy = SuggestionPolicy(table)
    assert suggest_action(policy, 4) == 2


def test_suggestion_skips_thin_cells():
    table = _table({(4, 2): 5.0})
    table.counts[4, 2] = 3  # under the default floor of 10
    policy = SuggestionPolicy(table)
    assert suggest_action(policy, 4) == 0
    relaxed = SuggestionPolicy(table, min_count=3)
    assert suggest_action(relaxed, 4) == 2


def test_suggestion_never_picks_forced_choice():
    table = _table({(s, 6): 99.0 for s in range(N_STATES)})
    policy = SuggestionPolicy(table)
    arr = suggestion_array(policy)
    assert arr.shape == (N_STATES,)
    assert set(arr.tolist()) == {0}


def test_suggestion_array_matches_pointwise(suggestion):
    arr = suggestion_array(suggestion)
    for s in range(N_STATES):
        assert arr[s] == suggest_action(suggestion, s)
