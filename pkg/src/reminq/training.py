"""Mixed RL/DAG policy training: forced rescue, weighted branches, schedules.

Four methods share one loop and differ only in branch weights: pure RL
(0.9, 0, 0.1), pure DAG guidance (0, 0.9, 0.1), an even static blend
(0.45, 0.45, 0.1), and a dynamic blend that hands control from the DAG
to the learner linearly over training.  Every step updates the Q-table
regardless of which branch picked the action, and a persistent negative
or confused patient always forces the GiveChoice rescue first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import kernels
from .cate import SuggestionPolicy, suggest_action, suggestion_array
from .mdp import N_ACTIONS, N_STATES, Action, PatientState, RewardParams
from .qlearn import N_SELECTABLE, QTable, TrainHyperparams, epsilon_greedy
from .sim import EpisodeConfig, EpisodeStatus, TransitionModel


class Method(str, Enum):
    RL = "rl"
    DAG = "dag"
    CRL_STATIC = "crl-static"
    CRL_DYNAMIC = "crl-dynamic"


@dataclass(frozen=True)
class MixedWeights:
    w_rl: float
    w_dag: float
    w_explore: float

    def __post_init__(self) -> None:
        if min(self.w_rl, self.w_dag, self.w_explore) < 0.0:
            raise ValueError("weights must be non-negative")
        total = self.w_rl + self.w_dag + self.w_explore
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {total!r}")


@dataclass
class MethodConfig:
    method: Method
    epochs: int = 1500
    episodes_per_epoch: int = 30
    hyperparams: TrainHyperparams = field(default_factory=TrainHyperparams)
    #: forced-rescue streak; None defers to the episode config
    persistence_k: int | None = None

    def __post_init__(self) -> None:
        self.method = Method(self.method)
        if self.epochs < 1 or self.episodes_per_epoch < 1:
            raise ValueError("epochs and episodes_per_epoch must be at least 1")
        if self.persistence_k is not None and self.persistence_k < 1:
            raise ValueError("persistence_k must be at least 1")


def weight_schedule(method: Method, epoch: int, total_epochs: int) -> MixedWeights:
    """Branch weights for one epoch; the dynamic method interpolates.

    Endpoint weights are computed as exact lerp endpoints so epoch 0 and
    the final epoch land on (0.2, 0.7) and (0.7, 0.2) precisely.
    """
    if not 0 <= epoch < total_epochs:
        raise ValueError(f"epoch {epoch} outside [0, {total_epochs})")
    method = Method(method)
    if method is Method.RL:
        return MixedWeights(0.9, 0.0, 0.1)
    if method is Method.DAG:
        return MixedWeights(0.0, 0.9, 0.1)
    if method is Method.CRL_STATIC:
        return MixedWeights(0.45, 0.45, 0.1)
    frac = 0.0 if total_epochs == 1 else epoch / (total_epochs - 1)
    w_rl = 0.2 * (1.0 - frac) + 0.7 * frac
    w_dag = 0.7 * (1.0 - frac) + 0.2 * frac
    return MixedWeights(w_rl, w_dag, 0.1)


def forced_give_choice(status: EpisodeStatus, k: int) -> bool:
    """True when a negative or confused streak has persisted ``k`` rounds."""
    return status.neg_streak >= k or status.conf_streak >= k


def mixed_select(
    w: MixedWeights,
    q: QTable,
    suggestion: SuggestionPolicy,
    state: PatientState | int,
    epsilon: float,
    rng: np.random.Generator,
) -> Action:
    """One weighted draw among the RL, DAG, and random branches.

    Draw protocol matches the loop backends: one coin, then the chosen
    branch's own draws (none for the DAG branch).
    """
    s = state.index() if isinstance(state, PatientState) else int(state)
    coin = rng.random()
    if coin <= w.w_rl:
        return Action(epsilon_greedy(q, s, epsilon, rng))
    if coin <= w.w_rl + w.w_dag:
        return suggest_action(suggestion, s)
    return Action(int(rng.random() * N_SELECTABLE))


@dataclass
class TrainLog:
    """Per-episode returns and lengths plus a Q snapshot after each epoch."""

    method: Method
    seed: int
    returns: np.ndarray
    lengths: np.ndarray
    snapshots: np.ndarray

    def __post_init__(self) -> None:
        self.method = Method(self.method)
        e, n = self.returns.shape
        if self.lengths.shape != (e, n):
            raise ValueError("returns and lengths must have matching shapes")
        if self.snapshots.shape != (e, N_STATES, N_ACTIONS):
            raise ValueError(f"snapshots must be ({e}, {N_STATES}, {N_ACTIONS})")

    @property
    def epochs(self) -> int:
        return self.returns.shape[0]

    @property
    def episodes_per_epoch(self) -> int:
        return self.returns.shape[1]

    def to_csv(self, path: str | Path) -> None:
        lines = ["epoch,episode,return,length"]
        e_count, n_count = self.returns.shape
        for e in range(e_count):
            for n in range(n_count):
                lines.append(
                    f"{e + 1},{n + 1},{float(self.returns[e, n])!r},{int(self.lengths[e, n])}"
                )
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    def save_snapshots(self, path: str | Path) -> None:
        np.save(path, self.snapshots)

    def final_qtable(self) -> QTable:
        return QTable(q=self.snapshots[-1].copy())


def train(
    model: TransitionModel,
    cfg: MethodConfig,
    suggestion: SuggestionPolicy | None,
    seed: int,
    episode: EpisodeConfig | None = None,
    reward_params: RewardParams | None = None,
    backend: str | None = None,
) -> tuple[QTable, TrainLog]:
    """Run the full epoch/episode loop for one method and seed.

    DAG-guided methods require a suggestion policy; pure RL ignores one.
    The environment and policy streams persist across epochs, so the
    whole run is a deterministic function of (seed, config, model,
    suggestion).
    """
    episode = episode if episode is not None else EpisodeConfig()
    reward_params = reward_params if reward_params is not None else RewardParams()
    needs_dag = cfg.method in (Method.DAG, Method.CRL_STATIC, Method.CRL_DYNAMIC)
    if needs_dag and suggestion is None:
        raise ValueError(f"method {cfg.method.value} requires a suggestion policy")
    suggest = (
        suggestion_array(suggestion)
        if (suggestion is not None and needs_dag)
        else np.zeros(N_STATES, dtype=np.int64)
    )

    env_gen, pol_gen = kernels.make_streams(seed)
    q = np.zeros((N_STATES, N_ACTIONS))
    e_count, n_count = cfg.epochs, cfg.episodes_per_epoch
    returns = np.empty((e_count, n_count))
    lengths = np.empty((e_count, n_count), dtype=np.int64)
    snapshots = np.empty((e_count, N_STATES, N_ACTIONS))
    k = cfg.persistence_k if cfg.persistence_k is not None else episode.persistence_k

    for e in range(e_count):
        w = weight_schedule(cfg.method, e, e_count)
        ep_return, ep_length, _ = kernels.run_episodes(
            q,
            model,
            reward_params,
            episode,
            n_episodes=n_count,
            env_gen=env_gen,
            pol_gen=pol_gen,
            policy_kind=kernels.POLICY_MIXED,
            w_rl=w.w_rl,
            w_dag=w.w_dag,
            epsilon=cfg.hyperparams.epsilon,
            suggest=suggest,
            update=True,
            hp=cfg.hyperparams,
            persistence_k=k,
            backend=backend,
        )
        returns[e] = ep_return
        lengths[e] = ep_length
        snapshots[e] = q

    log = TrainLog(
        method=cfg.method, seed=seed, returns=returns, lengths=lengths, snapshots=snapshots
    )
    return QTable(q=q.copy()), log


def method_config_to_dict(cfg: MethodConfig) -> dict:
    return {
        "method": cfg.method.value,
        "epochs": cfg.epochs,
        "episodes_per_epoch": cfg.episodes_per_epoch,
        "alpha": cfg.hyperparams.alpha,
        "gamma": cfg.hyperparams.gamma,
        "epsilon": cfg.hyperparams.epsilon,
        "persistence_k": cfg.persistence_k,
    }


def load_trainlog_csv(path: str | Path, method: Method, seed: int, snapshots: np.ndarray) -> TrainLog:
    """Rebuild a TrainLog from its CSV and snapshot array artifacts."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "epoch,episode,return,length":
        raise ValueError(f"{path}: not a training log (bad header)")
    rows = [line.split(",") for line in lines[1:]]
    if not rows:
        raise ValueError(f"{path}: no rows")
    e_count = max(int(r[0]) for r in rows)
    n_count = max(int(r[1]) for r in rows)
    returns = np.zeros((e_count, n_count))
    lengths = np.zeros((e_count, n_count), dtype=np.int64)
    for r in rows:
        e, n = int(r[0]) - 1, int(r[1]) - 1
        returns[e, n] = float(r[2])
        lengths[e, n] = int(r[3])
    return TrainLog(method=method, seed=seed, returns=returns, lengths=lengths, snapshots=snapshots)
