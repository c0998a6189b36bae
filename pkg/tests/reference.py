"""Independent reference implementations the tests check the package against."""

from __future__ import annotations

import numpy as np

from reminq import N_ACTIONS, N_STATES


def brute_force_cate(dataset):
    """Record-order grouped means, written independently of the estimator."""
    sums = [[0.0] * N_ACTIONS for _ in range(N_STATES)]
    counts = [[0] * N_ACTIONS for _ in range(N_STATES)]
    states = dataset.state_indices()
    actions = dataset.column("a_t")
    rewards = dataset.rewards
    for i in range(len(dataset)):
        s, a = int(states[i]), int(actions[i])
        sums[s][a] += float(rewards[i])
        counts[s][a] += 1
    effects = np.zeros((N_STATES, N_ACTIONS))
    avail = np.zeros((N_STATES, N_ACTIONS), dtype=bool)
    for s in range(N_STATES):
        if counts[s][0] == 0:
            continue
        base = sums[s][0] / counts[s][0]
        for a in range(N_ACTIONS):
            if counts[s][a] > 0:
                effects[s, a] = sums[s][a] / counts[s][a] - base
                avail[s, a] = True
    return effects, np.array(counts), avail
