"""Causal-structure-aware Q-learning workbench for simulated therapy sessions.

The pipeline: simulate randomized patient interactions, learn which
actions causally help in which states, then train Q-learning policies
that blend learned value with that causal guidance, and evaluate them
under the deployment protocols.
"""

from .cate import (
    CateTable,
    SuggestionPolicy,
    estimate_cate,
    suggest_action,
    suggestion_array,
)
from .data import Dataset, TrajectoryRecord, collect_random_trajectories
from .discovery import CausalGraph, CITestResult, g_test_ci, pc_learn
from .evaluation import (
    EvalMode,
    EvalReport,
    EvalSeries,
    evaluate_snapshot,
    evaluate_training,
    policy_array,
    render_report,
    smooth,
    threshold_proportion,
)
from .mdp import (
    ACTION_LABELS,
    N_ACTIONS,
    N_STATES,
    STATE_LABELS,
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
    state_label,
)
from .qlearn import QTable, TrainHyperparams, epsilon_greedy, greedy_action, q_update
from .sim import (
    DoneReason,
    EpisodeConfig,
    EpisodeStatus,
    PatientEnv,
    TransitionModel,
    default_transition_model,
    sample_next_state,
)
from .training import (
    Method,
    MethodConfig,
    MixedWeights,
    TrainLog,
    forced_give_choice,
    mixed_select,
    train,
    weight_schedule,
)

__version__ = "0.1.0"
