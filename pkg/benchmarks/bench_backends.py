"""Compare the compiled episode loops against the pure-Python fallback.

Runs the three hot paths (random collection, mixed-policy training,
greedy evaluation) on both backends and prints steps per second plus the
speedup.  Results are checked for bit equality while we are at it, so a
drifting fallback shows up here before it shows up in the tests.

Usage: python3 benchmarks/bench_backends.py [--episodes N] [--epochs E]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from reminq import (
    EpisodeConfig,
    Method,
    MethodConfig,
    RewardParams,
    SuggestionPolicy,
    collect_random_trajectories,
    default_transition_model,
    estimate_cate,
    train,
)
from reminq.kernels import POLICY_GREEDY, available_backends, make_streams, run_episodes


def time_collect(model, cfg, episodes, backend):
    t0 = time.perf_counter()
    ds = collect_random_trajectories(model, cfg, n_episodes=episodes, seed=1,
                                     backend=backend)
    return time.perf_counter() - t0, len(ds), ds.rewards.sum()


def time_train(model, cfg, suggestion, epochs, backend):
    mcfg = MethodConfig(Method.CRL_DYNAMIC, epochs=epochs, episodes_per_epoch=30)
    t0 = time.perf_counter()
    q, log = train(model, mcfg, suggestion, seed=1, backend=backend)
    return time.perf_counter() - t0, int(log.lengths.sum()), q.q.sum()


def time_eval(model, cfg, episodes, backend):
    q = np.zeros((18, 7))
    env_gen, pol_gen = make_streams(5)
    t0 = time.perf_counter()
    returns, lengths, _ = run_episodes(
        q, model, RewardParams(), cfg, n_episodes=episodes,
        env_gen=env_gen, pol_gen=pol_gen, policy_kind=POLICY_GREEDY,
        backend=backend,
    )
    return time.perf_counter() - t0, int(lengths.sum()), returns.sum()


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--episodes", type=int, default=20000,
                        help="episodes for the collect and eval passes")
    parser.add_argument("--epochs", type=int, default=100,
                        help="epochs of 30 episodes for the training pass")
    args = parser.parse_args()

    model = default_transition_model()
    cfg = EpisodeConfig()
    ds = collect_random_trajectories(model, cfg, n_episodes=5000, seed=0)
    suggestion = SuggestionPolicy(estimate_cate(ds))

    passes = [
        ("collect", lambda b: time_collect(model, cfg, args.episodes, b)),
        ("train", lambda b: time_train(model, cfg, suggestion, args.epochs, b)),
        ("eval", lambda b: time_eval(model, cfg, args.episodes, b)),
    ]

    print(f"{'pass':<10} {'backend':<10} {'steps':>10} {'seconds':>9} {'steps/s':>12}")
    for name, fn in passes:
        rows = {}
        for backend in available_backends():
            seconds, steps, checksum = fn(backend)
            rows[backend] = (seconds, steps, checksum)
            print(f"{name:<10} {backend:<10} {steps:>10} {seconds:>9.3f} "
                  f"{steps / seconds:>12.0f}")
        (sec_c, steps_c, sum_c), (sec_p, steps_p, sum_p) = rows["compiled"], rows["python"]
        agree = steps_c == steps_p and sum_c == sum_p
        print(f"{'':<10} speedup {sec_p / sec_c:>5.1f}x   results identical: {agree}")
        if not agree:
            raise SystemExit(f"{name}: backends disagree")


if __name__ == "__main__":
    main()
