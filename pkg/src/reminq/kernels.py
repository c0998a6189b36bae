"""Backend selection and array-level wrappers for the episode loops.

The compiled extension (``reminq._loops``) is preferred when present;
``reminq._loops_py`` is the pure-Python twin.  Set ``REMINQ_BACKEND`` to
``compiled`` or ``python`` to force one.  Both produce bit-identical
output for the same seed, so the choice only affects speed.
"""

from __future__ import annotations

import os

import numpy as np

from . import _loops_py
from .mdp import N_STATES, RewardParams
from .qlearn import TrainHyperparams
from .sim import EpisodeConfig, TransitionModel

try:
    from . import _loops
except ImportError:
    _loops = None

POLICY_GREEDY = 0
POLICY_MIXED = 1

#: Episode end causes as encoded by the loop backends.
REASON_EARLY_STOP = 0
REASON_ALL_TRIGGERS = 1
REASON_ROUND_CAP = 2


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if _loops is not None else ("python",)


def default_backend() -> str:
    forced = os.environ.get("REMINQ_BACKEND")
    if forced:
        if forced not in ("compiled", "python"):
            raise ValueError(f"REMINQ_BACKEND must be 'compiled' or 'python', got {forced!r}")
        if forced == "compiled" and _loops is None:
            raise RuntimeError("REMINQ_BACKEND=compiled but the extension is not built")
        return forced
    return "compiled" if _loops is not None else "python"


def _module(backend: str | None):
    name = backend if backend is not None else default_backend()
    if name == "compiled":
        if _loops is None:
            raise RuntimeError("compiled backend requested but the extension is not built")
        return _loops
    if name == "python":
        return _loops_py
    raise ValueError(f"unknown backend {name!r}")


def make_streams(entropy) -> tuple[np.random.Generator, np.random.Generator]:
    """Environment and policy RNG streams derived from one entropy value.

    Keeping the streams separate means a policy that consumes a different
    number of draws still faces the same sequence of patients.
    """
    env_seq, pol_seq = np.random.SeedSequence(entropy).spawn(2)
    return (
        np.random.Generator(np.random.PCG64(env_seq)),
        np.random.Generator(np.random.PCG64(pol_seq)),
    )


def collect_episodes(
    model: TransitionModel,
    params: RewardParams,
    config: EpisodeConfig,
    n_episodes: int,
    env_gen: np.random.Generator,
    pol_gen: np.random.Generator,
    backend: str | None = None,
):
    """Uniform-random episodes; returns (codes, rewards, ep_len, ep_reason).

    ``codes`` rows hold (rp_t, e_t, c_t, a_t, rp_t1, e_t1, c_t1, a_t1).
    """
    if n_episodes < 1:
        raise ValueError(f"n_episodes must be at least 1, got {n_episodes}")
    cap = n_episodes * config.max_rounds
    codes = np.empty((cap, 8), dtype=np.int16)
    rewards = np.empty(cap, dtype=np.float64)
    ep_len = np.empty(n_episodes, dtype=np.int64)
    ep_reason = np.empty(n_episodes, dtype=np.int8)
    total = _module(backend).collect_episodes(
        model.cdf(),
        params.response_table,
        params.emotion_table,
        params.confusion_table,
        params.eta,
        params.trigger_bonus,
        params.lambda_stop,
        params.lambda_goal,
        config.max_rounds,
        config.total_triggers,
        config.earlystop_m,
        n_episodes,
        env_gen,
        pol_gen,
        codes,
        rewards,
        ep_len,
        ep_reason,
    )
    return codes[:total].copy(), rewards[:total].copy(), ep_len, ep_reason


def run_episodes(
    q: np.ndarray,
    model: TransitionModel,
    params: RewardParams,
    config: EpisodeConfig,
    *,
    n_episodes: int,
    env_gen: np.random.Generator,
    pol_gen: np.random.Generator,
    policy_kind: int = POLICY_GREEDY,
    w_rl: float = 0.0,
    w_dag: float = 0.0,
    epsilon: float = 0.0,
    suggest: np.ndarray | None = None,
    update: bool = False,
    hp: TrainHyperparams | None = None,
    persistence_k: int | None = None,
    backend: str | None = None,
):
    """Greedy or mixed-policy episodes; returns (returns, lengths, reasons).

    ``q`` is mutated in place when ``update`` is set.  The forced rescue
    rule is always active, keyed by ``persistence_k`` (defaults to the
    episode config's value).
    """
    if n_episodes < 1:
        raise ValueError(f"n_episodes must be at least 1, got {n_episodes}")
    if q.shape != (N_STATES, 7):
        raise ValueError(f"q must be {N_STATES}x7, got {q.shape}")
    if q.dtype != np.float64 or not q.flags["C_CONTIGUOUS"]:
        # a converting copy here would silently drop in-place updates
        raise ValueError("q must be a C-contiguous float64 array")
    if suggest is None:
        suggest = np.zeros(N_STATES, dtype=np.int64)
    suggest = np.ascontiguousarray(suggest, dtype=np.int64)
    if suggest.shape != (N_STATES,):
        raise ValueError("suggest must map all 18 states to an action")
    hp = hp if hp is not None else TrainHyperparams()
    k = persistence_k if persistence_k is not None else config.persistence_k
    out_return = np.empty(n_episodes, dtype=np.float64)
    out_length = np.empty(n_episodes, dtype=np.int64)
    out_reason = np.empty(n_episodes, dtype=np.int8)
    _module(backend).run_policy_episodes(
        q,
        model.cdf(),
        params.response_table,
        params.emotion_table,
        params.confusion_table,
        params.eta,
        params.trigger_bonus,
        params.lambda_stop,
        params.lambda_goal,
        config.max_rounds,
        config.total_triggers,
        k,
        config.earlystop_m,
        policy_kind,
        w_rl,
        w_dag,
        epsilon,
        suggest,
        1 if update else 0,
        hp.alpha,
        hp.gamma,
        n_episodes,
        env_gen,
        pol_gen,
        out_return,
        out_length,
        out_reason,
    )
    return out_return, out_length, out_reason
