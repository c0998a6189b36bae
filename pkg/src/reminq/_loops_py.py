"""Pure-Python episode loops: the always-available backend.

Mirrors ``_loops.pyx`` statement for statement.  Both backends consume
single uniform doubles from two PCG64 streams (one for the environment,
one for the policy) in the same order and apply float operations in the
same order, so results are bit-identical whichever backend runs.

Draw protocol per step:

* environment stream: exactly one draw (next-state sample)
* policy stream: logging policy one draw; greedy zero; mixed policy one
  coin draw, then inside the RL branch one epsilon draw plus one more
  when exploring, or one draw in the residual random branch
"""

from __future__ import annotations

COMPILED = False

_START = 2  # (no response, neutral, unconfused)


def _next_state(cdf_row, u):
    k = 0
    while k < 17 and u >= cdf_row[k]:
        k += 1
    return k


def _argmax_selectable(q_row):
    best = 0
    best_val = q_row[0]
    for j in range(1, 6):
        if q_row[j] > best_val:
            best = j
            best_val = q_row[j]
    return best


def _max_all(q_row):
    m = q_row[0]
    for j in range(1, 7):
        if q_row[j] > m:
            m = q_row[j]
    return m


def collect_episodes(
    cdf,
    resp,
    emo,
    conf,
    eta,
    delta,
    lam_stop,
    lam_goal,
    max_rounds,
    total_triggers,
    earlystop_m,
    n_episodes,
    env_gen,
    pol_gen,
    codes,
    rewards,
    ep_len,
    ep_reason,
):
    """Run uniformly random episodes, logging one record per step.

    Returns the total number of records written.  The forced-rescue rule
    is off here: actions stay independent of state by construction.
    """
    cdf_l = cdf.tolist()
    resp_l = resp.tolist()
    emo_l = emo.tolist()
    conf_l = conf.tolist()
    env_next = env_gen.random
    pol_next = pol_gen.random

    total = 0
    for ep in range(n_episodes):
        s = _START
        rounds = 0
        trig = 0
        neg = 0
        confused = 0
        prev_row = -1
        reason = -1
        while True:
            a = int(pol_next() * 6.0)
            u = env_next()
            s1 = _next_state(cdf_l[s][a], u)
            rp1, rest = divmod(s1, 6)
            ei1, c1 = divmod(rest, 2)

            neg = neg + 1 if ei1 == 0 else 0
            confused = confused + 1 if c1 == 1 else 0
            early = neg >= earlystop_m
            new_trigger = rp1 == 2 and trig < total_triggers
            if new_trigger:
                trig += 1
            rounds += 1
            done = False
            goal = False
            if early:
                done = True
                reason = 0
            elif trig == total_triggers:
                done = True
                goal = True
                reason = 1
            elif rounds == max_rounds:
                done = True
                goal = True
                reason = 2

            r = resp_l[rp1][a]
            r += emo_l[ei1]
            r += conf_l[c1]
            r += eta
            if new_trigger:
                r += delta
            if early:
                r += lam_stop
            if goal:
                r += lam_goal

            rp0, rest0 = divmod(s, 6)
            ei0, c0 = divmod(rest0, 2)
            row = codes[total]
            row[0] = rp0
            row[1] = ei0 - 1
            row[2] = c0
            row[3] = a
            row[4] = rp1
            row[5] = ei1 - 1
            row[6] = c1
            row[7] = a  # provisional; patched by the next step unless terminal
            if prev_row >= 0:
                codes[prev_row, 7] = a
            rewards[total] = r
            prev_row = total
            total += 1

            if done:
                break
            s = s1
        ep_len[ep] = rounds
        ep_reason[ep] = reason
    return total


def run_policy_episodes(
    q,
    cdf,
    resp,
    emo,
    conf,
    eta,
    delta,
    lam_stop,
    lam_goal,
    max_rounds,
    total_triggers,
    persistence_k,
    earlystop_m,
    policy_kind,
    w_rl,
    w_dag,
    epsilon,
    suggest,
    do_update,
    alpha,
    gamma,
    n_episodes,
    env_gen,
    pol_gen,
    out_return,
    out_length,
    out_reason,
):
    """Run episodes under the greedy (0) or mixed (1) policy.

    The forced rescue action preempts both policies whenever a negative or
    confused streak reaches ``persistence_k``.  With ``do_update`` set the
    Q-table is updated in place on every step.
    """
    q_l = q.tolist()
    cdf_l = cdf.tolist()
    resp_l = resp.tolist()
    emo_l = emo.tolist()
    conf_l = conf.tolist()
    sug_l = suggest.tolist()
    env_next = env_gen.random
    pol_next = pol_gen.random
    w_mix = w_rl + w_dag

    for ep in range(n_episodes):
        s = _START
        rounds = 0
        trig = 0
        neg = 0
        confused = 0
        ep_return = 0.0
        reason = -1
        while True:
            if neg >= persistence_k or confused >= persistence_k:
                a = 6
            elif policy_kind == 0:
                a = _argmax_selectable(q_l[s])
            else:
                coin = pol_next()
                if coin <= w_rl:
                    if pol_next() < epsilon:
                        a = int(pol_next() * 6.0)
                    else:
                        a = _argmax_selectable(q_l[s])
                elif coin <= w_mix:
                    a = sug_l[s]
                else:
                    a = int(pol_next() * 6.0)

            u = env_next()
            s1 = _next_state(cdf_l[s][a], u)
            rp1, rest = divmod(s1, 6)
            ei1, c1 = divmod(rest, 2)

            neg = neg + 1 if ei1 == 0 else 0
            confused = confused + 1 if c1 == 1 else 0
            early = neg >= earlystop_m
            new_trigger = rp1 == 2 and trig < total_triggers
            if new_trigger:
                trig += 1
            rounds += 1
            done = False
            goal = False
            if early:
                done = True
                reason = 0
            elif trig == total_triggers:
                done = True
                goal = True
                reason = 1
            elif rounds == max_rounds:
                done = True
                goal = True
                reason = 2

            r = resp_l[rp1][a]
            r += emo_l[ei1]
            r += conf_l[c1]
            r += eta
            if new_trigger:
                r += delta
            if early:
                r += lam_stop
            if goal:
                r += lam_goal

            if do_update:
                if done:
                    target = r
                else:
                    target = r + gamma * _max_all(q_l[s1])
                q_row = q_l[s]
                q_row[a] += alpha * (target - q_row[a])

            ep_return += r
            if done:
                break
            s = s1
        out_return[ep] = ep_return
        out_length[ep] = rounds
        out_reason[ep] = reason

    if do_update:
        for i in range(18):
            row = q_l[i]
            for j in range(7):
                q[i, j] = row[j]
