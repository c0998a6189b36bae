"""Command-line workbench: simulate, discover, train, eval, report.

The pipeline is file-based: each stage reads the previous stage's
artifacts, so every stage is independently rerunnable and the whole
chain is deterministic given the config.  Exit codes: 0 success,
1 usage error, 2 data or config error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cate import CateTable, SuggestionPolicy, estimate_cate
from .data import DataError, Dataset, collect_random_trajectories
from .discovery import pc_learn
from .evaluation import (
    DEFAULT_THRESHOLDS,
    EvalMode,
    EvalReport,
    evaluate_training,
    policy_array,
    render_report,
)
from .mdp import RewardParams
from .qlearn import QTable, TrainHyperparams
from .sim import EpisodeConfig, TransitionModel, default_transition_model
from .training import Method, MethodConfig, train

log = logging.getLogger("reminq")


class UsageError(Exception):
    """Bad command line; exits with status 1."""


class ConfigError(Exception):
    """Bad config content or missing artifacts; exits with status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we map usage to 1
        raise UsageError(message)


# --- experiment config -----------------------------------------------------


@dataclass
class ModelSpec:
    strength: float = 0.9
    seed: int = 0
    path: str | None = None

    def build(self) -> TransitionModel:
        if self.path is not None:
            return TransitionModel.load(self.path)
        return default_transition_model(strength=self.strength, seed=self.seed)


@dataclass
class DiscoveryParams:
    alpha: float = 0.05
    max_cond_size: int = 3
    n_log_episodes: int = 2000
    reward_bins: int = 3
    min_count: int = 10


@dataclass
class TrainParams:
    methods: list[str] = field(
        default_factory=lambda: ["rl", "dag", "crl-static", "crl-dynamic"]
    )
    epochs: int = 1500
    episodes_per_epoch: int = 30
    alpha: float = 0.05
    gamma: float = 0.95
    epsilon: float = 0.1
    seeds: list[int] = field(default_factory=lambda: [1])
    persistence_k: int | None = None


@dataclass
class EvalParams:
    modes: list[str] = field(default_factory=lambda: ["rl-only", "strategy-consistent"])
    episodes_per_epoch: int = 30
    final_runs: int = 100
    window: int = 30
    thresholds: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    seed: int = 1234
    epoch_stride: int = 1


@dataclass
class ExperimentConfig:
    model: ModelSpec = field(default_factory=ModelSpec)
    reward: RewardParams = field(default_factory=RewardParams)
    episode: EpisodeConfig = field(default_factory=EpisodeConfig)
    discovery: DiscoveryParams = field(default_factory=DiscoveryParams)
    train: TrainParams = field(default_factory=TrainParams)
    eval: EvalParams = field(default_factory=EvalParams)

    def to_dict(self) -> dict:
        return {
            "model": {
                "strength": self.model.strength,
                "seed": self.model.seed,
                "path": self.model.path,
            },
            "reward": json.loads(self.reward.to_json()),
            "episode": {
                "max_rounds": self.episode.max_rounds,
                "total_triggers": self.episode.total_triggers,
                "persistence_k": self.episode.persistence_k,
                "earlystop_m": self.episode.earlystop_m,
                "seed": self.episode.seed,
            },
            "discovery": vars(self.discovery).copy(),
            "train": {k: (list(v) if isinstance(v, list) else v) for k, v in vars(self.train).items()},
            "eval": {
                "modes": list(self.eval.modes),
                "episodes_per_epoch": self.eval.episodes_per_epoch,
                "final_runs": self.eval.final_runs,
                "window": self.eval.window,
                "thresholds": dict(self.eval.thresholds),
                "seed": self.eval.seed,
                "epoch_stride": self.eval.epoch_stride,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, payload: dict) -> "ExperimentConfig":
        if not isinstance(payload, dict):
            raise ConfigError("config must be a JSON object")
        known = {"model", "reward", "episode", "discovery", "train", "eval"}
        unknown = set(payload) - known
        if unknown:
            raise ConfigError(f"unknown config section(s): {', '.join(sorted(unknown))}")

        def build(section: str, factory, allowed: set[str]):
            raw = payload.get(section, {})
            if not isinstance(raw, dict):
                raise ConfigError(f"config section {section!r} must be an object")
            bad = set(raw) - allowed
            if bad:
                raise ConfigError(f"unknown key(s) in {section!r}: {', '.join(sorted(bad))}")
            try:
                return factory(**raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"invalid {section!r} section: {exc}") from exc

        reward_raw = payload.get("reward")
        try:
            reward = (
                RewardParams.from_json(json.dumps(reward_raw))
                if reward_raw is not None
                else RewardParams()
            )
        except ValueError as exc:
            raise ConfigError(f"invalid 'reward' section: {exc}") from exc

        methods = payload.get("train", {}).get("methods", None)
        if methods is not None:
            for m in methods:
                try:
                    Method(m)
                except ValueError:
                    raise ConfigError(
                        f"unknown method {m!r}; expected one of "
                        f"{', '.join(x.value for x in Method)}"
                    ) from None
        modes = payload.get("eval", {}).get("modes", None)
        if modes is not None:
            for m in modes:
                try:
                    EvalMode(m)
                except ValueError:
                    raise ConfigError(
                        f"unknown eval mode {m!r}; expected one of "
                        f"{', '.join(x.value for x in EvalMode)}"
                    ) from None

        return cls(
            model=build("model", ModelSpec, {"strength", "seed", "path"}),
            reward=reward,
            episode=build(
                "episode",
                EpisodeConfig,
                {"max_rounds", "total_triggers", "persistence_k", "earlystop_m", "seed"},
            ),
            discovery=build(
                "discovery",
                DiscoveryParams,
                {"alpha", "max_cond_size", "n_log_episodes", "reward_bins", "min_count"},
            ),
            train=build(
                "train",
                TrainParams,
                {
                    "methods",
                    "epochs",
                    "episodes_per_epoch",
                    "alpha",
                    "gamma",
                    "epsilon",
                    "seeds",
                    "persistence_k",
                },
            ),
            eval=build(
                "eval",
                EvalParams,
                {
                    "modes",
                    "episodes_per_epoch",
                    "final_runs",
                    "window",
                    "thresholds",
                    "seed",
                    "epoch_stride",
                },
            ),
        )

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
        return cls.from_dict(payload)


# --- subcommand handlers ----------------------------------------------------


def _load_config(args) -> ExperimentConfig:
    if args.config is None:
        return ExperimentConfig()
    return ExperimentConfig.load(args.config)


def cmd_default_config(args) -> None:
    text = ExperimentConfig().to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> None:
    cfg = _load_config(args)
    episodes = args.episodes if args.episodes is not None else cfg.discovery.n_log_episodes
    if episodes < 1:
        raise UsageError(f"--episodes must be at least 1, got {episodes}")
    seed = args.seed if args.seed is not None else cfg.episode.seed
    try:
        model = cfg.model.build()
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot build transition model: {exc}") from exc
    data = collect_random_trajectories(
        model, cfg.episode, episodes, seed=seed, params=cfg.reward
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    data.to_csv(out)
    log.info("wrote %s (%d records, %d episodes)", out, len(data), data.n_episodes)


def cmd_discover(args) -> None:
    cfg = _load_config(args)
    data = Dataset.from_csv(args.dataset)
    graph = pc_learn(
        data,
        alpha=cfg.discovery.alpha,
        max_cond_size=cfg.discovery.max_cond_size,
        reward_bins=cfg.discovery.reward_bins,
    )
    cate = estimate_cate(data)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    graph.save(out_dir / "graph.json")
    cate.save(out_dir / "cate.json")
    log.info("wrote %s and %s", out_dir / "graph.json", out_dir / "cate.json")


def _load_suggestion(path, min_count: int) -> SuggestionPolicy:
    try:
        return SuggestionPolicy(cate=CateTable.load(path), min_count=min_count)
    except OSError as exc:
        raise ConfigError(f"cannot read CATE table {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"invalid CATE table {path}: {exc}") from exc


def cmd_train(args) -> None:
    cfg = _load_config(args)
    methods = [Method(m) for m in (args.methods or cfg.train.methods)]
    if not methods:
        raise ConfigError("no training methods selected")
    seeds = args.seeds if args.seeds else cfg.train.seeds
    model = cfg.model.build()
    needs_dag = any(m is not Method.RL for m in methods)
    suggestion = None
    if needs_dag:
        if args.cate is None:
            raise ConfigError(
                "methods "
                + ", ".join(m.value for m in methods if m is not Method.RL)
                + " need a CATE table; pass --cate"
            )
        suggestion = _load_suggestion(args.cate, cfg.discovery.min_count)
    hp = TrainHyperparams(alpha=cfg.train.alpha, gamma=cfg.train.gamma, epsilon=cfg.train.epsilon)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for method in methods:
        mc = MethodConfig(
            method=method,
            epochs=cfg.train.epochs,
            episodes_per_epoch=cfg.train.episodes_per_epoch,
            hyperparams=hp,
            persistence_k=cfg.train.persistence_k,
        )
        for seed in seeds:
            qtable, tlog = train(
                model,
                mc,
                suggestion if method is not Method.RL else None,
                seed,
                episode=cfg.episode,
                reward_params=cfg.reward,
            )
            stem = f"{method.value}_{seed}"
            tlog.to_csv(out_dir / f"trainlog_{stem}.csv")
            qtable.save(out_dir / f"qtable_{stem}.json")
            tlog.save_snapshots(out_dir / f"snapshots_{stem}.npy")
            log.info("trained %s (seed %d): mean final-epoch return %.2f",
                     stem, seed, float(np.mean(tlog.returns[-1])))


def cmd_eval(args) -> None:
    cfg = _load_config(args)
    methods = [Method(m) for m in (args.methods or cfg.train.methods)]
    seeds = args.seeds if args.seeds else cfg.train.seeds
    modes = [EvalMode(m) for m in (args.modes or cfg.eval.modes)]
    runs_dir = Path(args.runs_dir)

    expected = [runs_dir / f"snapshots_{m.value}_{s}.npy" for m in methods for s in seeds]
    missing = [p for p in expected if not p.exists()]
    if missing:
        raise ConfigError(
            "missing snapshot artifact(s): " + ", ".join(str(p) for p in missing)
        )

    needs_dag = any(
        mode is EvalMode.STRATEGY_CONSISTENT and m is not Method.RL
        for mode in modes
        for m in methods
    )
    suggestion = None
    if needs_dag:
        if args.cate is None:
            raise ConfigError("strategy-consistent evaluation of DAG-guided methods needs --cate")
        suggestion = _load_suggestion(args.cate, cfg.discovery.min_count)

    model = cfg.model.build()
    report = EvalReport(window=cfg.eval.window, thresholds=dict(cfg.eval.thresholds))
    for mode in modes:
        for method in methods:
            for seed in seeds:
                snapshots = np.load(runs_dir / f"snapshots_{method.value}_{seed}.npy")
                series = evaluate_training(
                    snapshots,
                    method,
                    mode,
                    model,
                    cfg.episode,
                    suggestion if method is not Method.RL else None,
                    seed=(cfg.eval.seed, seed),
                    n_episodes=cfg.eval.episodes_per_epoch,
                    final_runs=cfg.eval.final_runs,
                    window=cfg.eval.window,
                    thresholds=cfg.eval.thresholds,
                    epoch_stride=cfg.eval.epoch_stride,
                    reward_params=cfg.reward,
                )
                report.runs.append(series)
                log.info("evaluated %s %s seed %d", method.value, mode.value, seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report.save(out_dir / "report.json")
    render_report(report, out_dir)
    log.info("wrote evaluation artifacts to %s", out_dir)


def cmd_report(args) -> None:
    report_path = Path(args.eval_dir) / "report.json"
    if not report_path.exists():
        raise ConfigError(f"missing evaluation report: {report_path}")
    try:
        report = EvalReport.load(report_path)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out_dir = Path(args.out_dir) if args.out_dir else Path(args.eval_dir)
    render_report(report, out_dir)
    if args.json:
        (out_dir / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    if args.export_policy:
        if (args.from_qtable is None) == (args.from_cate is None):
            raise UsageError("--export-policy needs exactly one of --from-qtable / --from-cate")
        if args.from_qtable:
            try:
                arr = policy_array(q=QTable.load(args.from_qtable))
            except (OSError, ValueError) as exc:
                raise ConfigError(f"cannot export policy from {args.from_qtable}: {exc}") from exc
        else:
            cfg = _load_config(args)
            suggestion = _load_suggestion(args.from_cate, cfg.discovery.min_count)
            arr = policy_array(suggestion=suggestion)
        Path(args.export_policy).write_text(
            json.dumps(arr, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        log.info("wrote policy array %s", args.export_policy)
    log.info("report rendered to %s", out_dir)


# --- argument wiring ---------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="reminq", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="info-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("default-config", help="print or write the default config")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_default_config)

    p = sub.add_parser("simulate", help="log random-policy episodes to CSV")
    p.add_argument("--config", default=None)
    p.add_argument("--episodes", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("discover", help="learn graph and effect table from a dataset")
    p.add_argument("--config", default=None)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("train", help="train one or more methods")
    p.add_argument("--config", default=None)
    p.add_argument("--cate", default=None, help="CATE JSON for DAG-guided methods")
    p.add_argument("--methods", nargs="+", default=None)
    p.add_argument("--seeds", nargs="+", type=int, default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate training snapshots")
    p.add_argument("--config", default=None)
    p.add_argument("--runs-dir", required=True)
    p.add_argument("--cate", default=None)
    p.add_argument("--methods", nargs="+", default=None)
    p.add_argument("--seeds", nargs="+", type=int, default=None)
    p.add_argument("--modes", nargs="+", default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="re-render report artifacts; export policies")
    p.add_argument("--config", default=None)
    p.add_argument("--eval-dir", required=True)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--json", action="store_true", help="also write the full report JSON")
    p.add_argument("--export-policy", default=None, metavar="PATH")
    p.add_argument("--from-qtable", default=None, metavar="QTABLE_JSON")
    p.add_argument("--from-cate", default=None, metavar="CATE_JSON")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
