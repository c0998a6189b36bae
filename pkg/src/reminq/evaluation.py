"""Snapshot evaluation, figure metrics, and report rendering.

Two execution modes mirror how a trained policy can be deployed: pure
greedy Q execution, or keeping the training-time branch mix at test
time.  Per-epoch snapshot evaluations feed six series (raw and smoothed
mean return, high/low return proportions, mean length, long-episode
proportion); the final snapshot additionally gets a wider 100-run pass.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import kernels
from .cate import SuggestionPolicy, suggest_action, suggestion_array
from .mdp import ACTION_LABELS, N_STATES, STATE_LABELS, RewardParams
from .qlearn import QTable, greedy_action
from .sim import EpisodeConfig, TransitionModel
from .svgchart import line_chart
from .training import Method, MixedWeights, weight_schedule

DEFAULT_THRESHOLDS = {"high_return": 150.0, "low_return": 50.0, "long_episode": 40.0}
METHOD_ORDER = (Method.RL, Method.DAG, Method.CRL_STATIC, Method.CRL_DYNAMIC)
METRIC_COLUMNS = ("mean_return", "smoothed_return", "p_gt150", "p_lt50", "mean_len", "p_ge40")
CSV_HEADER = "epoch," + ",".join(METRIC_COLUMNS)
CHART_METRICS = ("smoothed_return", "p_gt150", "p_lt50", "mean_len", "p_ge40")


class EvalMode(str, Enum):
    RL_ONLY = "rl-only"
    STRATEGY_CONSISTENT = "strategy-consistent"


def smooth(series, window: int = 30) -> list[float]:
    """Trailing moving average with truncated warm-up windows."""
    if window < 1:
        raise ValueError(f"window must be at least 1, got {window}")
    values = list(series)
    out = []
    for i in range(len(values)):
        lo = max(0, i - window + 1)
        chunk = values[lo : i + 1]
        out.append(sum(chunk) / len(chunk))
    return out


def threshold_proportion(series, op: str, threshold: float) -> float:
    """Fraction of entries satisfying ``value <op> threshold``."""
    values = list(series)
    if not values:
        raise ValueError("series must be nonempty")
    if op == ">":
        hits = sum(1 for v in values if v > threshold)
    elif op == "<":
        hits = sum(1 for v in values if v < threshold)
    elif op == ">=":
        hits = sum(1 for v in values if v >= threshold)
    else:
        raise ValueError(f"unsupported comparison {op!r}")
    return hits / len(values)


def evaluate_snapshot(
    q: QTable,
    suggestion: SuggestionPolicy | None,
    weights_at_eval: MixedWeights | None,
    model: TransitionModel,
    cfg: EpisodeConfig,
    n_episodes: int,
    seed,
    reward_params: RewardParams | None = None,
    epsilon: float = 0.1,
    backend: str | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Run one frozen snapshot; returns (returns, lengths).

    ``weights_at_eval=None`` means greedy execution.  Either way the
    forced rescue rule stays active and the Q-table is never written.
    """
    reward_params = reward_params if reward_params is not None else RewardParams()
    env_gen, pol_gen = kernels.make_streams(seed)
    if weights_at_eval is None:
        kind, w_rl, w_dag, eps = kernels.POLICY_GREEDY, 0.0, 0.0, 0.0
    else:
        kind = kernels.POLICY_MIXED
        w_rl, w_dag, eps = weights_at_eval.w_rl, weights_at_eval.w_dag, epsilon
    suggest = suggestion_array(suggestion) if suggestion is not None else None
    returns, lengths, _ = kernels.run_episodes(
        q.q,
        model,
        reward_params,
        cfg,
        n_episodes=n_episodes,
        env_gen=env_gen,
        pol_gen=pol_gen,
        policy_kind=kind,
        w_rl=w_rl,
        w_dag=w_dag,
        epsilon=eps,
        suggest=suggest,
        update=False,
        backend=backend,
    )
    return returns, lengths


@dataclass
class EvalSeries:
    """All per-epoch metric series for one (method, mode, seed) run."""

    method: Method
    mode: EvalMode
    seed: int
    epochs: list[int]
    mean_return: list[float]
    smoothed_return: list[float]
    p_gt150: list[float]
    p_lt50: list[float]
    mean_len: list[float]
    p_ge40: list[float]
    final_returns: list[float]
    final_lengths: list[int]

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "mode": self.mode.value,
            "seed": self.seed,
            "epochs": self.epochs,
            "mean_return": self.mean_return,
            "smoothed_return": self.smoothed_return,
            "p_gt150": self.p_gt150,
            "p_lt50": self.p_lt50,
            "mean_len": self.mean_len,
            "p_ge40": self.p_ge40,
            "final": {"returns": self.final_returns, "lengths": self.final_lengths},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvalSeries":
        return cls(
            method=Method(d["method"]),
            mode=EvalMode(d["mode"]),
            seed=int(d["seed"]),
            epochs=[int(v) for v in d["epochs"]],
            mean_return=[float(v) for v in d["mean_return"]],
            smoothed_return=[float(v) for v in d["smoothed_return"]],
            p_gt150=[float(v) for v in d["p_gt150"]],
            p_lt50=[float(v) for v in d["p_lt50"]],
            mean_len=[float(v) for v in d["mean_len"]],
            p_ge40=[float(v) for v in d["p_ge40"]],
            final_returns=[float(v) for v in d["final"]["returns"]],
            final_lengths=[int(v) for v in d["final"]["lengths"]],
        )


def evaluate_training(
    snapshots: np.ndarray,
    method: Method,
    mode: EvalMode,
    model: TransitionModel,
    cfg: EpisodeConfig,
    suggestion: SuggestionPolicy | None,
    seed,
    n_episodes: int = 30,
    final_runs: int = 100,
    window: int = 30,
    thresholds: dict | None = None,
    epoch_stride: int = 1,
    reward_params: RewardParams | None = None,
    backend: str | None = None,
) -> EvalSeries:
    """Evaluate every ``epoch_stride``-th snapshot plus a final wide pass.

    The per-epoch entropy extends the caller's seed with the epoch index,
    so different methods evaluated under the same seed face identical
    patient streams (common random numbers).
    """
    thresholds = thresholds if thresholds is not None else DEFAULT_THRESHOLDS
    mode = EvalMode(mode)
    method = Method(method)
    if mode is EvalMode.STRATEGY_CONSISTENT and method is not Method.RL and suggestion is None:
        raise ValueError(f"mode {mode.value} with method {method.value} needs a suggestion policy")
    total_epochs = snapshots.shape[0]
    base = tuple(seed) if isinstance(seed, (tuple, list)) else (seed,)

    epoch_ids = list(range(0, total_epochs, epoch_stride))
    if epoch_ids[-1] != total_epochs - 1:
        epoch_ids.append(total_epochs - 1)

    mean_return: list[float] = []
    p_gt150: list[float] = []
    p_lt50: list[float] = []
    mean_len: list[float] = []
    p_ge40: list[float] = []
    for e in epoch_ids:
        weights = (
            None if mode is EvalMode.RL_ONLY else weight_schedule(method, e, total_epochs)
        )
        returns, lengths = evaluate_snapshot(
            QTable(q=snapshots[e].copy()),
            suggestion,
            weights,
            model,
            cfg,
            n_episodes,
            base + (e,),
            reward_params=reward_params,
            backend=backend,
        )
        rlist = returns.tolist()
        llist = lengths.tolist()
        mean_return.append(sum(rlist) / len(rlist))
        p_gt150.append(threshold_proportion(rlist, ">", thresholds["high_return"]))
        p_lt50.append(threshold_proportion(rlist, "<", thresholds["low_return"]))
        mean_len.append(sum(llist) / len(llist))
        p_ge40.append(threshold_proportion(llist, ">=", thresholds["long_episode"]))

    final_weights = (
        None
        if mode is EvalMode.RL_ONLY
        else weight_schedule(method, total_epochs - 1, total_epochs)
    )
    final_returns, final_lengths = evaluate_snapshot(
        QTable(q=snapshots[-1].copy()),
        suggestion,
        final_weights,
        model,
        cfg,
        final_runs,
        base + (total_epochs,),
        reward_params=reward_params,
        backend=backend,
    )

    return EvalSeries(
        method=method,
        mode=mode,
        seed=int(base[-1]),
        epochs=[e + 1 for e in epoch_ids],
        mean_return=mean_return,
        smoothed_return=smooth(mean_return, window),
        p_gt150=p_gt150,
        p_lt50=p_lt50,
        mean_len=mean_len,
        p_ge40=p_ge40,
        final_returns=final_returns.tolist(),
        final_lengths=[int(v) for v in final_lengths],
    )


@dataclass
class EvalReport:
    """Evaluation series for every (method, mode, seed) combination run."""

    window: int = 30
    thresholds: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    runs: list[EvalSeries] = field(default_factory=list)

    def methods(self) -> list[Method]:
        seen = []
        for run in self.runs:
            if run.method not in seen:
                seen.append(run.method)
        return sorted(seen, key=METHOD_ORDER.index)

    def modes(self) -> list[EvalMode]:
        seen = []
        for run in self.runs:
            if run.mode not in seen:
                seen.append(run.mode)
        return sorted(seen, key=lambda m: m.value, reverse=True)

    def select(self, method: Method, mode: EvalMode) -> list[EvalSeries]:
        return [r for r in self.runs if r.method == method and r.mode == mode]

    def aggregate(self, method: Method, mode: EvalMode) -> dict[str, list[float]]:
        """Seed-averaged series; proportions pool because counts match."""
        runs = self.select(method, mode)
        if not runs:
            raise ValueError(f"no runs for method={method.value} mode={mode.value}")
        out: dict[str, list[float]] = {"epochs": [float(e) for e in runs[0].epochs]}
        for name in METRIC_COLUMNS:
            stacks = [getattr(r, name) for r in runs]
            if any(len(s) != len(stacks[0]) for s in stacks):
                raise ValueError("runs disagree on evaluated epochs; cannot aggregate")
            out[name] = [sum(col) / len(col) for col in zip(*stacks)]
        out["final_returns"] = [v for r in runs for v in r.final_returns]
        out["final_lengths"] = [float(v) for r in runs for v in r.final_lengths]
        return out

    def to_json(self) -> str:
        payload = {
            "window": self.window,
            "thresholds": self.thresholds,
            "runs": [r.to_dict() for r in self.runs],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"eval report is not valid JSON: {exc}") from exc
        return cls(
            window=int(payload["window"]),
            thresholds={k: float(v) for k, v in payload["thresholds"].items()},
            runs=[EvalSeries.from_dict(d) for d in payload["runs"]],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "EvalReport":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def render_report(report: EvalReport, out_dir: str | Path) -> list[Path]:
    """Write metrics.csv plus one SVG per chart metric; all-or-nothing."""
    if not report.runs:
        raise ValueError("report holds no evaluation runs; nothing to render")
    out_dir = Path(out_dir)

    csv_lines: list[str] = []
    chart_series: dict[str, list[tuple[str, list[float]]]] = {m: [] for m in CHART_METRICS}
    for mode in report.modes():
        for method in report.methods():
            if not report.select(method, mode):
                continue
            agg = report.aggregate(method, mode)
            csv_lines.append(f"# method={method.value} mode={mode.value}")
            csv_lines.append(CSV_HEADER)
            for i, epoch in enumerate(agg["epochs"]):
                cells = [str(int(epoch))]
                cells += [repr(float(agg[name][i])) for name in METRIC_COLUMNS]
                csv_lines.append(",".join(cells))
            label = f"{method.value} ({mode.value})"
            for metric in CHART_METRICS:
                chart_series[metric].append((label, agg[metric]))

    charts = {
        metric: line_chart(metric.replace("_", " "), chart_series[metric], y_label=metric)
        for metric in CHART_METRICS
    }

    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    csv_path = out_dir / "metrics.csv"
    csv_path.write_text("\n".join(csv_lines) + "\n", encoding="utf-8")
    written.append(csv_path)
    for metric, svg in charts.items():
        path = out_dir / f"{metric}.svg"
        path.write_text(svg, encoding="utf-8")
        written.append(path)
    return written


def policy_array(
    q: QTable | None = None, suggestion: SuggestionPolicy | None = None
) -> dict[str, str]:
    """Frozen state-to-action map, from a Q-table (greedy) or suggestions."""
    if (q is None) == (suggestion is None):
        raise ValueError("provide exactly one of q or suggestion")
    out: dict[str, str] = {}
    for s in range(N_STATES):
        if q is not None:
            a = greedy_action(q, s)
        else:
            a = int(suggest_action(suggestion, s))
        out[STATE_LABELS[s]] = ACTION_LABELS[a]
    return out
