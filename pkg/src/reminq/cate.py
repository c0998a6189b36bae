"""Per-state action-effect estimates from randomized interaction logs.

Because logging randomizes actions independently of state, the effect of
an action in a state is just the difference of conditional reward means
against the EasyPrompt baseline.  Cells never observed are *unavailable*,
which is distinct from an estimated zero.

The estimates double as a decision rule: in each state, suggest the
best-looking sufficiently-sampled action if it beats the baseline,
otherwise fall back to the baseline itself.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import Dataset
from .mdp import (
    ACTION_LABELS,
    N_ACTIONS,
    N_STATES,
    STATE_LABELS,
    Action,
    PatientState,
)

BASELINE_ACTION = Action.EASY_PROMPT


@dataclass
class CateTable:
    """Effect-vs-baseline and sample count per (state, action) cell.

    ``effects[s, a]`` is meaningful only where ``available[s, a]``; the
    baseline column is zero by definition wherever it was observed.
    ``extras`` carries unrecognized per-state JSON fields through load
    and save untouched.
    """

    effects: np.ndarray
    counts: np.ndarray
    available: np.ndarray
    extras: dict[str, dict[str, object]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.effects = np.ascontiguousarray(self.effects, dtype=np.float64)
        self.counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        self.available = np.ascontiguousarray(self.available, dtype=bool)
        shape = (N_STATES, N_ACTIONS)
        if self.effects.shape != shape or self.counts.shape != shape or self.available.shape != shape:
            raise ValueError(f"cate arrays must all be {shape}")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")

    def cell(self, state: PatientState | int, action: Action | int):
        s = state.index() if isinstance(state, PatientState) else int(state)
        a = int(action)
        if not self.available[s, a]:
            return None, int(self.counts[s, a])
        return float(self.effects[s, a]), int(self.counts[s, a])

    def to_json(self) -> str:
        states: dict[str, dict[str, object]] = {}
        for s, label in enumerate(STATE_LABELS):
            row: dict[str, object] = {}
            for a, alabel in enumerate(ACTION_LABELS):
                effect = float(self.effects[s, a]) if self.available[s, a] else None
                row[alabel] = {"avg_effect": effect, "count": int(self.counts[s, a])}
            row.update(self.extras.get(label, {}))
            states[label] = row
        payload = {"baseline": ACTION_LABELS[BASELINE_ACTION], "states": states}
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CateTable":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"cate table is not valid JSON: {exc}") from exc
        if not isinstance(payload, dict) or "states" not in payload:
            raise ValueError('cate JSON must be an object with a "states" key')
        effects = np.zeros((N_STATES, N_ACTIONS))
        counts = np.zeros((N_STATES, N_ACTIONS), dtype=np.int64)
        available = np.zeros((N_STATES, N_ACTIONS), dtype=bool)
        extras: dict[str, dict[str, object]] = {}
        label_to_idx = {label: i for i, label in enumerate(STATE_LABELS)}
        action_to_idx = {label: i for i, label in enumerate(ACTION_LABELS)}
        for label, row in payload["states"].items():
            if label not in label_to_idx:
                raise ValueError(f"unknown state label {label!r}")
            s = label_to_idx[label]
            for key, value in row.items():
                if key not in action_to_idx:
                    extras.setdefault(label, {})[key] = value
                    continue
                a = action_to_idx[key]
                counts[s, a] = int(value["count"])
                if value["avg_effect"] is not None:
                    effects[s, a] = float(value["avg_effect"])
                    available[s, a] = True
        return cls(effects=effects, counts=counts, available=available, extras=extras)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "CateTable":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def estimate_cate(data: Dataset) -> CateTable:
    """Grouped-mean effect estimates, accumulated in record order.

    Summation order is part of the contract: an independent
    implementation that groups rewards per cell and sums them in record
    order reproduces these numbers bit for bit.
    """
    sums = [[0.0] * N_ACTIONS for _ in range(N_STATES)]
    counts = [[0] * N_ACTIONS for _ in range(N_STATES)]
    states = data.state_indices().tolist()
    actions = data.column("a_t").tolist()
    rewards = data.rewards.tolist()
    for s, a, r in zip(states, actions, rewards):
        sums[s][a] += r
        counts[s][a] += 1

    effects = np.zeros((N_STATES, N_ACTIONS))
    count_arr = np.array(counts, dtype=np.int64)
    available = np.zeros((N_STATES, N_ACTIONS), dtype=bool)
    for s in range(N_STATES):
        base_n = counts[s][BASELINE_ACTION]
        if base_n == 0:
            continue
        base_mean = sums[s][BASELINE_ACTION] / base_n
        available[s, BASELINE_ACTION] = True
        for a in range(N_ACTIONS):
            if a == BASELINE_ACTION or counts[s][a] == 0:
                continue
            effects[s, a] = sums[s][a] / counts[s][a] - base_mean
            available[s, a] = True
    return CateTable(effects=effects, counts=count_arr, available=available)


@dataclass(frozen=True)
class SuggestionPolicy:
    """CATE-backed action choice with a minimum-sample guard."""

    cate: CateTable
    min_count: int = 10

    def __post_init__(self) -> None:
        if self.min_count < 1:
            raise ValueError(f"min_count must be at least 1, got {self.min_count}")


def suggest_action(policy: SuggestionPolicy, state: PatientState | int) -> Action:
    """Best well-sampled positive-effect action in ``state``, else baseline.

    Only the five freely selectable non-baseline actions compete; the
    forced rescue action is never suggested.  Ties break low.
    """
    s = state.index() if isinstance(state, PatientState) else int(state)
    table = policy.cate
    best = BASELINE_ACTION
    best_effect = 0.0
    for a in range(1, 6):
        if not table.available[s, a] or table.counts[s, a] < policy.min_count:
            continue
        effect = float(table.effects[s, a])
        if effect > best_effect:
            best = Action(a)
            best_effect = effect
    return best


def suggestion_array(policy: SuggestionPolicy) -> np.ndarray:
    """Suggested action per state index, for the episode-loop backends."""
    return np.array([int(suggest_action(policy, s)) for s in range(N_STATES)], dtype=np.int64)
