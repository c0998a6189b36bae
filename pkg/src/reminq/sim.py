"""Patient simulator: transition model, episode mechanics, default world.

A :class:`TransitionModel` is a dense ``18 x 7 x 18`` table of next-state
probabilities.  :class:`PatientEnv` runs one session at a time: it samples
next states, tracks negative-emotion and confusion streaks, counts memory
triggers (relevant responses), and ends the session on an early stop
(sustained negative emotion), on exhausting the trigger budget, or at the
round cap.

:func:`default_transition_model` builds a hand-shaped synthetic patient
whose causal texture the discovery stage is expected to pick up: explaining
clears confusion, comforting lifts negative mood, demanding prompts draw
relevant responses but stress a confused or upset patient, and repetition
bores an unconfused one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .mdp import (
    N_ACTIONS,
    N_STATES,
    START_STATE,
    Action,
    Confusion,
    Emotion,
    PatientState,
    ResponseRelevance,
    RewardParams,
    StepFlags,
    decode_state,
    encode_state,
    reward,
)


class EpisodeDoneError(RuntimeError):
    """Raised when stepping an episode that already ended."""


class DoneReason(Enum):
    EARLY_STOP = "early_stop"
    ALL_TRIGGERS = "all_triggers"
    ROUND_CAP = "round_cap"


@dataclass(frozen=True)
class EpisodeConfig:
    """Session-level knobs shared by logging, training, and evaluation."""

    max_rounds: int = 50
    total_triggers: int = 5
    persistence_k: int = 2
    earlystop_m: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("max_rounds", "total_triggers", "persistence_k", "earlystop_m"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")


@dataclass
class EpisodeStatus:
    round: int = 0
    triggers_used: int = 0
    neg_streak: int = 0
    conf_streak: int = 0
    done: bool = False
    done_reason: DoneReason | None = None


@dataclass
class TransitionModel:
    """Next-state distribution per (state, action), dense and row-stochastic."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        self.probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        if self.probs.shape != (N_STATES, N_ACTIONS, N_STATES):
            raise ValueError(
                f"transition table must be {N_STATES}x{N_ACTIONS}x{N_STATES}, "
                f"got {self.probs.shape}"
            )
        if np.any(self.probs < 0.0):
            raise ValueError("transition probabilities must be non-negative")
        sums = self.probs.sum(axis=2)
        if np.any(np.abs(sums - 1.0) > 1e-9):
            bad = np.argwhere(np.abs(sums - 1.0) > 1e-9)[0]
            raise ValueError(
                f"transition row (state={bad[0]}, action={bad[1]}) sums to "
                f"{sums[bad[0], bad[1]]!r}, expected 1"
            )
        self._cdf: np.ndarray | None = None

    def cdf(self) -> np.ndarray:
        """Cumulative row distributions, cached; shared by both loop backends."""
        if self._cdf is None:
            self._cdf = np.ascontiguousarray(np.cumsum(self.probs, axis=2))
        return self._cdf

    def to_json(self) -> str:
        return json.dumps({"probs": self.probs.tolist()}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TransitionModel":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"transition model is not valid JSON: {exc}") from exc
        if not isinstance(payload, dict) or "probs" not in payload:
            raise ValueError('transition model JSON must be an object with a "probs" key')
        return cls(probs=np.asarray(payload["probs"], dtype=np.float64))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TransitionModel":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def sample_next_state(
    model: TransitionModel,
    state: PatientState,
    action: Action | int,
    rng: np.random.Generator,
) -> PatientState:
    """Draw the next state using one uniform double and the row's CDF."""
    row = model.cdf()[encode_state(state), int(action)]
    u = rng.random()
    nxt = int(np.searchsorted(row, u, side="right"))
    if nxt >= N_STATES:
        nxt = N_STATES - 1
    return decode_state(nxt)


class PatientEnv:
    """One simulated session; step-by-step twin of the compiled episode loop.

    The environment consumes exactly one uniform draw per step from its own
    stream, so a fixed seed replays the same patient regardless of how the
    acting policy was randomized.
    """

    def __init__(
        self,
        model: TransitionModel,
        reward_params: RewardParams | None = None,
        config: EpisodeConfig | None = None,
    ) -> None:
        self.model = model
        self.reward_params = reward_params if reward_params is not None else RewardParams()
        self.config = config if config is not None else EpisodeConfig()
        self._rng = np.random.Generator(np.random.PCG64(self.config.seed))
        self._state = START_STATE
        self._status = EpisodeStatus(done=True)

    @property
    def state(self) -> PatientState:
        return self._state

    @property
    def status(self) -> EpisodeStatus:
        return replace(self._status)

    def reset(self, seed: int | None = None) -> tuple[PatientState, EpisodeStatus]:
        """Start a new session; reseeding is optional and replaces the stream."""
        if seed is not None:
            self._rng = np.random.Generator(np.random.PCG64(seed))
        self._state = START_STATE
        self._status = EpisodeStatus()
        return self._state, self.status

    def step(self, action: Action | int) -> tuple[PatientState, float, bool, StepFlags]:
        if self._status.done:
            raise EpisodeDoneError("episode already finished; call reset() first")
        a = int(action)
        if not 0 <= a < N_ACTIONS:
            raise ValueError(f"action out of range: {a}")
        cfg = self.config
        st = self._status

        nxt = sample_next_state(self.model, self._state, a, self._rng)

        neg_streak = st.neg_streak + 1 if nxt.e == Emotion.NEGATIVE else 0
        conf_streak = st.conf_streak + 1 if nxt.c == Confusion.PRESENT else 0
        early_stop = neg_streak >= cfg.earlystop_m

        new_trigger = (
            nxt.rp == ResponseRelevance.RELEVANT and st.triggers_used < cfg.total_triggers
        )
        triggers_used = st.triggers_used + 1 if new_trigger else st.triggers_used

        round_next = st.round + 1
        done = False
        reason: DoneReason | None = None
        goal = False
        if early_stop:
            done, reason = True, DoneReason.EARLY_STOP
        elif triggers_used == cfg.total_triggers:
            done, reason, goal = True, DoneReason.ALL_TRIGGERS, True
        elif round_next == cfg.max_rounds:
            done, reason, goal = True, DoneReason.ROUND_CAP, True

        flags = StepFlags(new_trigger=new_trigger, early_stop=early_stop, goal_reached=goal)
        r = reward(self.reward_params, a, nxt, flags)

        self._state = nxt
        self._status = EpisodeStatus(
            round=round_next,
            triggers_used=triggers_used,
            neg_streak=neg_streak,
            conf_streak=conf_streak,
            done=done,
            done_reason=reason,
        )
        return nxt, r, done, flags


# --- default synthetic patient ------------------------------------------

# P(next confusion = present) per (confusion, action).  Explaining clears
# confusion fast; hard prompts induce or entrench it.
_CONFUSION_ONSET = np.array(
    [
        [0.04, 0.10, 0.26, 0.12, 0.04, 0.05, 0.04],
        [0.80, 0.85, 0.90, 0.65, 0.10, 0.80, 0.38],
    ]
)

# Next-emotion rows (neg, neu, pos) per current emotion and action.
# Comfort is the reliable rescue from a negative spell, GiveChoice a weaker
# one; hard prompts and repeats sour the mood; a positive mood is sticky
# under gentle actions.
_EMOTION_ROWS = {
    Emotion.NEGATIVE: np.array(
        [
            [0.56, 0.35, 0.09],
            [0.66, 0.27, 0.07],
            [0.80, 0.17, 0.03],
            [0.74, 0.22, 0.04],
            [0.46, 0.43, 0.11],
            [0.10, 0.50, 0.40],
            [0.275, 0.575, 0.15],
        ]
    ),
    Emotion.NEUTRAL: np.array(
        [
            [0.07, 0.59, 0.34],
            [0.12, 0.54, 0.34],
            [0.26, 0.55, 0.19],
            [0.20, 0.66, 0.14],
            [0.07, 0.59, 0.34],
            [0.05, 0.57, 0.38],
            [0.08, 0.68, 0.24],
        ]
    ),
    Emotion.POSITIVE: np.array(
        [
            [0.03, 0.11, 0.86],
            [0.04, 0.11, 0.85],
            [0.12, 0.26, 0.62],
            [0.10, 0.28, 0.62],
            [0.03, 0.12, 0.85],
            [0.02, 0.10, 0.88],
            [0.05, 0.18, 0.77],
        ]
    ),
}

# Next-response base rows (NR, IR, RR) per (confusion, emotion).  Relevant
# recall is rare by default; prompts have to earn it (see the action tilts
# below), which is what makes trigger pacing a real decision.
_RESPONSE_BASE = {
    (Confusion.PRESENT, Emotion.NEGATIVE): np.array([0.78, 0.19, 0.03]),
    (Confusion.PRESENT, Emotion.NEUTRAL): np.array([0.58, 0.37, 0.05]),
    (Confusion.PRESENT, Emotion.POSITIVE): np.array([0.50, 0.43, 0.07]),
    (Confusion.ABSENT, Emotion.NEGATIVE): np.array([0.60, 0.34, 0.06]),
    (Confusion.ABSENT, Emotion.NEUTRAL): np.array([0.18, 0.74, 0.08]),
    (Confusion.ABSENT, Emotion.POSITIVE): np.array([0.10, 0.80, 0.10]),
}


def _tilt(p: np.ndarray, idx: int, amount: float) -> np.ndarray:
    """Move `amount` of probability mass onto index `idx`, proportionally."""
    out = (1.0 - amount) * p
    out[idx] += amount
    return out


def _response_factor(state: PatientState, action: int) -> np.ndarray:
    p = _RESPONSE_BASE[(state.c, state.e)].copy()
    confused = state.c == Confusion.PRESENT
    upset = state.e == Emotion.NEGATIVE
    if action == Action.EASY_PROMPT:
        p = _tilt(p, 1, 0.10 if confused else 0.08)
    elif action == Action.MODERATE_PROMPT:
        if confused:
            p = _tilt(p, 0, 0.08)
        elif upset:
            p = _tilt(p, 0, 0.05)
        else:
            p = _tilt(p, 2, 0.14)
    elif action == Action.DIFFICULT_PROMPT:
        if confused:
            p = _tilt(p, 0, 0.15)
        elif upset:
            p = _tilt(p, 0, 0.12)
        elif state.rp == ResponseRelevance.NO_RESPONSE:
            # a hard prompt stonewalls a patient who is not talking yet
            p = _tilt(p, 0, 0.10)
        else:
            p = _tilt(p, 2, 0.30)
    elif action == Action.REPEAT:
        p = _tilt(p, 1, 0.10) if confused else _tilt(p, 0, 0.12)
    elif action == Action.EXPLAIN:
        p = _tilt(p, 1, 0.10) if confused else _tilt(p, 0, 0.04)
    elif action == Action.COMFORT:
        if upset:
            p = _tilt(p, 1, 0.06)
        elif state.e == Emotion.POSITIVE:
            p = _tilt(p, 0, 0.14)
        else:
            p = _tilt(p, 0, 0.05)
    elif action == Action.GIVE_CHOICE:
        p = _tilt(p, 1, 0.10)
    if state.rp == ResponseRelevance.RELEVANT:
        p = _tilt(p, 2, 0.05)
    elif state.rp == ResponseRelevance.NO_RESPONSE:
        p = _tilt(p, 0, 0.08)
    return p


# Unresolved confusion frustrates: being confused tilts the next emotion
# toward negative unless the action addresses it (Explain removes the cause,
# Comfort buffers the feeling).
_CONFUSION_FRUSTRATION = (0.14, 0.14, 0.14, 0.14, 0.0, 0.04, 0.14)


def _emotion_factor(state: PatientState, action: int) -> np.ndarray:
    p = _EMOTION_ROWS[state.e][action].copy()
    if state.c == Confusion.PRESENT:
        amount = _CONFUSION_FRUSTRATION[action]
        if amount:
            p = _tilt(p, 0, amount)
    return p


def _confusion_factor(state: PatientState, action: int) -> np.ndarray:
    p_on = _CONFUSION_ONSET[int(state.c), action]
    return np.array([1.0 - p_on, p_on])


def default_transition_model(strength: float = 0.9, seed: int = 0) -> TransitionModel:
    """Synthetic patient: shaped dynamics blended with uniform noise.

    ``strength`` scales how far rows move from uniform (0 gives the fully
    uniform table, 1 the fully shaped one).  A small seed-dependent jitter,
    also scaled by ``strength``, varies the patient across seeds without
    touching the qualitative action effects.
    """
    if not 0.0 <= strength <= 1.0:
        raise ValueError(f"strength must lie in [0, 1], got {strength!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    probs = np.empty((N_STATES, N_ACTIONS, N_STATES))
    for s in range(N_STATES):
        state = decode_state(s)
        for a in range(N_ACTIONS):
            p_rp = (1.0 - strength) / 3.0 + strength * _response_factor(state, a)
            p_e = (1.0 - strength) / 3.0 + strength * _emotion_factor(state, a)
            p_c = (1.0 - strength) / 2.0 + strength * _confusion_factor(state, a)
            joint = np.einsum("i,j,k->ijk", p_rp, p_e, p_c).reshape(N_STATES)
            jitter = np.exp(0.04 * strength * rng.standard_normal(N_STATES))
            row = joint * jitter
            probs[s, a] = row / row.sum()
    return TransitionModel(probs=probs)
