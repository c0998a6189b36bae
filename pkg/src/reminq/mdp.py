"""Core state, action, and reward definitions for the therapy-session MDP.

The patient is summarized by three observable features:

* response relevance: no response, irrelevant, or relevant
* emotion: negative, neutral, or positive
* confusion: absent or present

which gives ``3 * 3 * 2 = 18`` discrete states.  The robot chooses among
seven facilitation actions.  Rewards score the patient state *after* the
action, plus session-level bonuses and penalties (new memory trigger,
early stop, session goal).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

import numpy as np

N_STATES = 18
N_ACTIONS = 7


class ResponseRelevance(IntEnum):
    NO_RESPONSE = 0
    IRRELEVANT = 1
    RELEVANT = 2


class Emotion(IntEnum):
    NEGATIVE = -1
    NEUTRAL = 0
    POSITIVE = 1


class Confusion(IntEnum):
    ABSENT = 0
    PRESENT = 1


class Action(IntEnum):
    EASY_PROMPT = 0
    MODERATE_PROMPT = 1
    DIFFICULT_PROMPT = 2
    REPEAT = 3
    EXPLAIN = 4
    COMFORT = 5
    GIVE_CHOICE = 6


#: Actions the robot may pick freely.  GIVE_CHOICE is reserved for the
#: forced persistence rule and is never selected by value or at random.
SELECTABLE_ACTIONS = tuple(Action(i) for i in range(6))

#: Prompt-difficulty actions get response-specific scores; these share one.
OTHER_ACTIONS = frozenset(
    {Action.EASY_PROMPT, Action.REPEAT, Action.EXPLAIN, Action.COMFORT, Action.GIVE_CHOICE}
)

RESPONSE_LABELS = ("NR", "IR", "RR")
EMOTION_LABELS = ("Neg", "Neu", "Pos")
CONFUSION_LABELS = ("No", "Yes")
ACTION_LABELS = (
    "EasyPrompt",
    "ModeratePrompt",
    "DifficultPrompt",
    "Repeat",
    "Explain",
    "Comfort",
    "GiveChoice",
)


@dataclass(frozen=True)
class PatientState:
    """One observable patient state (response, emotion, confusion)."""

    rp: ResponseRelevance
    e: Emotion
    c: Confusion

    def index(self) -> int:
        return encode_state(self)

    def label(self) -> str:
        return "{}_{}_{}".format(
            RESPONSE_LABELS[self.rp], EMOTION_LABELS[self.e + 1], CONFUSION_LABELS[self.c]
        )


def encode_state(state: PatientState) -> int:
    """Map a state to its index in ``0..17`` (rp major, confusion minor)."""
    return int(state.rp) * 6 + (int(state.e) + 1) * 2 + int(state.c)


def decode_state(index: int) -> PatientState:
    if not 0 <= index < N_STATES:
        raise ValueError(f"state index out of range: {index}")
    rp, rest = divmod(index, 6)
    e, c = divmod(rest, 2)
    return PatientState(ResponseRelevance(rp), Emotion(e - 1), Confusion(c))


def state_label(index: int) -> str:
    return decode_state(index).label()


STATE_LABELS = tuple(state_label(i) for i in range(N_STATES))

#: Session opener: the patient has not yet responded, calm and unconfused.
START_STATE = PatientState(
    ResponseRelevance.NO_RESPONSE, Emotion.NEUTRAL, Confusion.ABSENT
)


def _default_response_table() -> np.ndarray:
    """Response-relevance score per (next response, action) cell.

    Any no-response outcome scores -2.  Irrelevant and relevant responses
    are graded by how demanding the prompt was; non-prompt actions share
    a flat consolation score.
    """
    table = np.empty((3, N_ACTIONS), dtype=np.float64)
    table[ResponseRelevance.NO_RESPONSE, :] = -2.0
    table[ResponseRelevance.IRRELEVANT, :] = 0.30
    table[ResponseRelevance.IRRELEVANT, Action.MODERATE_PROMPT] = 0.75
    table[ResponseRelevance.IRRELEVANT, Action.DIFFICULT_PROMPT] = 1.75
    table[ResponseRelevance.RELEVANT, :] = 0.75
    table[ResponseRelevance.RELEVANT, Action.MODERATE_PROMPT] = 2.0
    table[ResponseRelevance.RELEVANT, Action.DIFFICULT_PROMPT] = 3.0
    return table


@dataclass
class RewardParams:
    """Reward weights; defaults reproduce the workbench scoring scheme.

    ``response_table`` is indexed ``[next_rp, action]``, ``emotion_table``
    by ``next_e + 1``, ``confusion_table`` by ``next_c``.
    """

    response_table: np.ndarray = field(default_factory=_default_response_table)
    emotion_table: np.ndarray = field(
        default_factory=lambda: np.array([-3.0, 1.0, 2.0], dtype=np.float64)
    )
    confusion_table: np.ndarray = field(
        default_factory=lambda: np.array([2.0, -2.5], dtype=np.float64)
    )
    eta: float = 0.0
    trigger_bonus: float = 1.0
    lambda_stop: float = -200.0
    lambda_goal: float = 15.0

    def __post_init__(self) -> None:
        self.response_table = np.ascontiguousarray(self.response_table, dtype=np.float64)
        self.emotion_table = np.ascontiguousarray(self.emotion_table, dtype=np.float64)
        self.confusion_table = np.ascontiguousarray(self.confusion_table, dtype=np.float64)
        if self.response_table.shape != (3, N_ACTIONS):
            raise ValueError(f"response_table must be 3x{N_ACTIONS}")
        if self.emotion_table.shape != (3,):
            raise ValueError("emotion_table must have 3 entries")
        if self.confusion_table.shape != (2,):
            raise ValueError("confusion_table must have 2 entries")

    def to_json(self) -> str:
        payload = {
            "response_table": self.response_table.tolist(),
            "emotion_table": self.emotion_table.tolist(),
            "confusion_table": self.confusion_table.tolist(),
            "eta": self.eta,
            "trigger_bonus": self.trigger_bonus,
            "lambda_stop": self.lambda_stop,
            "lambda_goal": self.lambda_goal,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RewardParams":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"reward params are not valid JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise ValueError("reward params JSON must be an object")
        try:
            return cls(
                response_table=np.asarray(payload["response_table"], dtype=np.float64),
                emotion_table=np.asarray(payload["emotion_table"], dtype=np.float64),
                confusion_table=np.asarray(payload["confusion_table"], dtype=np.float64),
                eta=float(payload["eta"]),
                trigger_bonus=float(payload["trigger_bonus"]),
                lambda_stop=float(payload["lambda_stop"]),
                lambda_goal=float(payload["lambda_goal"]),
            )
        except KeyError as exc:
            raise ValueError(f"reward params JSON missing field: {exc}") from exc

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RewardParams":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class StepFlags:
    """Session events attached to one transition."""

    new_trigger: bool = False
    early_stop: bool = False
    goal_reached: bool = False


def reward(
    params: RewardParams,
    action: Action | int,
    next_state: PatientState,
    flags: StepFlags = StepFlags(),
) -> float:
    """Score a transition from the post-action patient state and events.

    The additions happen in a fixed order so results match the compiled
    episode loop bit for bit.
    """
    a = int(action)
    if not 0 <= a < N_ACTIONS:
        raise ValueError(f"action out of range: {a}")
    r = float(params.response_table[int(next_state.rp), a])
    r += float(params.emotion_table[int(next_state.e) + 1])
    r += float(params.confusion_table[int(next_state.c)])
    r += params.eta
    if flags.new_trigger:
        r += params.trigger_bonus
    if flags.early_stop:
        r += params.lambda_stop
    if flags.goal_reached:
        r += params.lambda_goal
    return r
