"""Interaction datasets: one record per step, logged under a random policy.

Each record carries the full transition tuple
``(rp_t, e_t, c_t, a_t, rp_t1, e_t1, c_t1, a_t1, reward)`` with emotion
coded -1/0/1 and everything else 0-based.  The terminal step of an
episode repeats its own action in ``a_t1`` by convention.

The CSV export holds the records only; episode boundaries are not part
of the file format, so a loaded dataset reports a single segment.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from . import kernels
from .mdp import RewardParams
from .sim import EpisodeConfig, TransitionModel

CSV_HEADER = "rp_t,e_t,c_t,a_t,rp_t1,e_t1,c_t1,a_t1,reward"
COLUMNS = tuple(CSV_HEADER.split(","))


class DataError(ValueError):
    """Malformed dataset file or inconsistent record content."""


@dataclass(frozen=True)
class TrajectoryRecord:
    rp_t: int
    e_t: int
    c_t: int
    a_t: int
    rp_t1: int
    e_t1: int
    c_t1: int
    a_t1: int
    reward: float

    def state_index(self) -> int:
        return self.rp_t * 6 + (self.e_t + 1) * 2 + self.c_t

    def next_state_index(self) -> int:
        return self.rp_t1 * 6 + (self.e_t1 + 1) * 2 + self.c_t1


_CODE_RANGES = {
    "rp_t": (0, 2),
    "e_t": (-1, 1),
    "c_t": (0, 1),
    "a_t": (0, 6),
    "rp_t1": (0, 2),
    "e_t1": (-1, 1),
    "c_t1": (0, 1),
    "a_t1": (0, 6),
}


class Dataset:
    """Ordered trajectory records plus episode boundary offsets."""

    def __init__(
        self,
        codes: np.ndarray,
        rewards: np.ndarray,
        episodes: np.ndarray,
        episode_reasons: np.ndarray | None = None,
    ) -> None:
        codes = np.ascontiguousarray(codes, dtype=np.int16)
        rewards = np.ascontiguousarray(rewards, dtype=np.float64)
        episodes = np.ascontiguousarray(episodes, dtype=np.int64)
        if codes.ndim != 2 or codes.shape[1] != 8:
            raise DataError(f"codes must be n x 8, got {codes.shape}")
        if rewards.shape != (codes.shape[0],):
            raise DataError("rewards length must match codes")
        if codes.shape[0] == 0:
            raise DataError("dataset must contain at least one record")
        for col, name in enumerate(COLUMNS[:8]):
            lo, hi = _CODE_RANGES[name]
            vals = codes[:, col]
            if vals.min() < lo or vals.max() > hi:
                raise DataError(f"column {name} holds values outside [{lo}, {hi}]")
        if (
            episodes.ndim != 1
            or len(episodes) < 2
            or episodes[0] != 0
            or episodes[-1] != codes.shape[0]
            or np.any(np.diff(episodes) < 1)
        ):
            raise DataError("episode boundaries must partition the records")
        self.codes = codes
        self.rewards = rewards
        self.episodes = episodes
        self.episode_reasons = episode_reasons

    def __len__(self) -> int:
        return self.codes.shape[0]

    @property
    def n_episodes(self) -> int:
        return len(self.episodes) - 1

    def episode_slice(self, i: int) -> slice:
        if not 0 <= i < self.n_episodes:
            raise IndexError(f"episode index out of range: {i}")
        return slice(int(self.episodes[i]), int(self.episodes[i + 1]))

    def record(self, i: int) -> TrajectoryRecord:
        row = self.codes[i]
        return TrajectoryRecord(
            *(int(v) for v in row),
            reward=float(self.rewards[i]),
        )

    def records(self) -> Iterator[TrajectoryRecord]:
        for i in range(len(self)):
            yield self.record(i)

    def column(self, name: str) -> np.ndarray:
        """Raw integer column, or the reward column, by CSV header name."""
        if name == "reward":
            return self.rewards
        if name not in COLUMNS:
            raise KeyError(f"unknown column {name!r}")
        return self.codes[:, COLUMNS.index(name)]

    def state_indices(self) -> np.ndarray:
        c = self.codes
        return c[:, 0].astype(np.int64) * 6 + (c[:, 1].astype(np.int64) + 1) * 2 + c[:, 2]

    def to_csv(self, path: str | Path) -> None:
        lines = [CSV_HEADER]
        codes = self.codes
        rewards = self.rewards
        for i in range(len(self)):
            row = codes[i]
            # repr of a builtin float is the shortest string that parses back
            # to the same bits, so the file round-trips exactly
            lines.append(
                f"{row[0]},{row[1]},{row[2]},{row[3]},"
                f"{row[4]},{row[5]},{row[6]},{row[7]},{float(rewards[i])!r}"
            )
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def from_csv(cls, path: str | Path) -> "Dataset":
        text = Path(path).read_text(encoding="utf-8")
        lines = text.splitlines()
        if not lines:
            raise DataError(f"{path}: empty file")
        if lines[0] != CSV_HEADER:
            got = lines[0].split(",")
            missing = [c for c in COLUMNS if c not in got]
            if missing:
                raise DataError(f"{path}: line 1: header missing column(s) {', '.join(missing)}")
            raise DataError(f"{path}: line 1: header must be exactly {CSV_HEADER!r}")
        n = len(lines) - 1
        if n == 0:
            raise DataError(f"{path}: no records")
        codes = np.empty((n, 8), dtype=np.int16)
        rewards = np.empty(n, dtype=np.float64)
        for i, line in enumerate(lines[1:]):
            lineno = i + 2
            parts = line.split(",")
            if len(parts) != 9:
                raise DataError(f"{path}: line {lineno}: expected 9 fields, got {len(parts)}")
            try:
                for j in range(8):
                    codes[i, j] = int(parts[j])
                rewards[i] = float(parts[8])
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: {exc}") from exc
        try:
            return cls(codes, rewards, np.array([0, n], dtype=np.int64))
        except DataError as exc:
            raise DataError(f"{path}: {exc}") from exc


def collect_random_trajectories(
    model: TransitionModel,
    config: EpisodeConfig,
    n_episodes: int,
    seed: int | None = None,
    params: RewardParams | None = None,
    backend: str | None = None,
) -> Dataset:
    """Log ``n_episodes`` under uniformly random selectable actions.

    The forced rescue rule stays off so actions are independent of state,
    which is what makes the downstream effect estimates identifiable.
    ``seed`` defaults to the episode config's seed.
    """
    if n_episodes < 1:
        raise ValueError(f"n_episodes must be at least 1, got {n_episodes}")
    entropy = config.seed if seed is None else seed
    env_gen, pol_gen = kernels.make_streams(entropy)
    codes, rewards, ep_len, ep_reason = kernels.collect_episodes(
        model,
        params if params is not None else RewardParams(),
        config,
        n_episodes,
        env_gen,
        pol_gen,
        backend=backend,
    )
    boundaries = np.concatenate([[0], np.cumsum(ep_len)])
    return Dataset(codes, rewards, boundaries, episode_reasons=ep_reason)
