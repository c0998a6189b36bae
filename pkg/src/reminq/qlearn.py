"""Tabular Q-learning: the 18 x 7 value table and its primitive ops.

Action selection (greedy or epsilon-greedy) is restricted to the six
freely selectable actions; GIVE_CHOICE enters trajectories only through
the forced persistence rule.  The one-step update still bootstraps over
all seven columns so forced steps contribute value like any other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mdp import N_ACTIONS, N_STATES

N_SELECTABLE = 6


@dataclass
class TrainHyperparams:
    alpha: float = 0.05
    gamma: float = 0.95
    epsilon: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon!r}")


@dataclass
class QTable:
    q: np.ndarray

    def __post_init__(self) -> None:
        self.q = np.ascontiguousarray(self.q, dtype=np.float64)
        if self.q.shape != (N_STATES, N_ACTIONS):
            raise ValueError(f"q table must be {N_STATES}x{N_ACTIONS}, got {self.q.shape}")
        if not np.all(np.isfinite(self.q)):
            raise ValueError("q table entries must be finite")

    @classmethod
    def zeros(cls) -> "QTable":
        return cls(q=np.zeros((N_STATES, N_ACTIONS)))

    def copy(self) -> "QTable":
        return QTable(q=self.q.copy())

    def to_json(self) -> str:
        # repr-based float formatting round-trips bit for bit
        return json.dumps({"q": self.q.tolist()}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "QTable":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"q table is not valid JSON: {exc}") from exc
        if not isinstance(payload, dict) or "q" not in payload:
            raise ValueError('q table JSON must be an object with a "q" key')
        return cls(q=np.asarray(payload["q"], dtype=np.float64))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "QTable":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def greedy_action(q: QTable, s: int) -> int:
    """Best selectable action at state ``s``; ties go to the lowest index."""
    return int(np.argmax(q.q[s, :N_SELECTABLE]))


def epsilon_greedy(q: QTable, s: int, epsilon: float, rng: np.random.Generator) -> int:
    """Greedy with probability 1-epsilon, else uniform over selectable actions.

    Consumes one uniform draw, plus a second one on the explore branch;
    the compiled loop follows the same draw protocol.
    """
    if rng.random() < epsilon:
        return int(rng.random() * N_SELECTABLE)
    return greedy_action(q, s)


def q_update(
    q: QTable,
    s: int,
    a: int,
    r: float,
    s_next: int,
    done: bool,
    hp: TrainHyperparams,
) -> None:
    """One-step update in place; terminal transitions bootstrap with zero.

    The bootstrap maximum runs over all seven columns, including the
    forced-only action, so rescue steps feed value back as well.
    """
    target = r if done else r + hp.gamma * float(np.max(q.q[s_next]))
    q.q[s, a] += hp.alpha * (target - q.q[s, a])
