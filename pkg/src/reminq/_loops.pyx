# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled episode loops.

Statement-for-statement twin of ``_loops_py.py``: same draw protocol
(single uniform doubles from the env and policy streams) and same float
operation order, so the two backends produce bit-identical results.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.stdint cimport int8_t, int16_t, int64_t
from numpy.random cimport bitgen_t

COMPILED = True

cdef const char *CAPSULE_NAME = "BitGenerator"


cdef bitgen_t *_bitgen(object gen) except NULL:
    capsule = gen.bit_generator.capsule
    if not PyCapsule_IsValid(capsule, CAPSULE_NAME):
        raise ValueError("expected a numpy Generator backed by a BitGenerator")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, CAPSULE_NAME)


cdef inline int _next_state(const double *cdf_row, double u) noexcept nogil:
    cdef int k = 0
    while k < 17 and u >= cdf_row[k]:
        k += 1
    return k


cdef inline int _argmax_selectable(const double *q_row) noexcept nogil:
    cdef int best = 0, j
    cdef double best_val = q_row[0]
    for j in range(1, 6):
        if q_row[j] > best_val:
            best = j
            best_val = q_row[j]
    return best


cdef inline double _max_all(const double *q_row) noexcept nogil:
    cdef double m = q_row[0]
    cdef int j
    for j in range(1, 7):
        if q_row[j] > m:
            m = q_row[j]
    return m


def collect_episodes(
    double[:, :, ::1] cdf,
    double[:, ::1] resp,
    double[::1] emo,
    double[::1] conf,
    double eta,
    double delta,
    double lam_stop,
    double lam_goal,
    int max_rounds,
    int total_triggers,
    int earlystop_m,
    int n_episodes,
    object env_gen,
    object pol_gen,
    int16_t[:, ::1] codes,
    double[::1] rewards,
    int64_t[::1] ep_len,
    int8_t[::1] ep_reason,
):
    cdef bitgen_t *env_rng = _bitgen(env_gen)
    cdef bitgen_t *pol_rng = _bitgen(pol_gen)
    cdef int ep, a, s, s1, rp0, ei0, c0, rp1, ei1, c1
    cdef int rounds, trig, neg, confused, reason
    cdef long long total = 0, prev_row
    cdef bint early, new_trigger, done, goal
    cdef double u, r

    for ep in range(n_episodes):
        s = 2
        rounds = 0
        trig = 0
        neg = 0
        confused = 0
        prev_row = -1
        reason = -1
        while True:
            a = <int>(pol_rng.next_double(pol_rng.state) * 6.0)
            u = env_rng.next_double(env_rng.state)
            s1 = _next_state(&cdf[s, a, 0], u)
            rp1 = s1 / 6
            ei1 = (s1 % 6) / 2
            c1 = s1 % 2

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

            r = resp[rp1, a]
            r += emo[ei1]
            r += conf[c1]
            r += eta
            if new_trigger:
                r += delta
            if early:
                r += lam_stop
            if goal:
                r += lam_goal

            rp0 = s / 6
            ei0 = (s % 6) / 2
            c0 = s % 2
            codes[total, 0] = rp0
            codes[total, 1] = ei0 - 1
            codes[total, 2] = c0
            codes[total, 3] = a
            codes[total, 4] = rp1
            codes[total, 5] = ei1 - 1
            codes[total, 6] = c1
            codes[total, 7] = a  # provisional; patched by the next step unless terminal
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
    return int(total)


def run_policy_episodes(
    double[:, ::1] q,
    double[:, :, ::1] cdf,
    double[:, ::1] resp,
    double[::1] emo,
    double[::1] conf,
    double eta,
    double delta,
    double lam_stop,
    double lam_goal,
    int max_rounds,
    int total_triggers,
    int persistence_k,
    int earlystop_m,
    int policy_kind,
    double w_rl,
    double w_dag,
    double epsilon,
    int64_t[::1] suggest,
    int do_update,
    double alpha,
    double gamma,
    int n_episodes,
    object env_gen,
    object pol_gen,
    double[::1] out_return,
    int64_t[::1] out_length,
    int8_t[::1] out_reason,
):
    cdef bitgen_t *env_rng = _bitgen(env_gen)
    cdef bitgen_t *pol_rng = _bitgen(pol_gen)
    cdef int ep, a, s, s1, rp1, ei1, c1
    cdef int rounds, trig, neg, confused, reason
    cdef bint early, new_trigger, done, goal
    cdef double u, r, coin, target, ep_return
    cdef double w_mix = w_rl + w_dag

    for ep in range(n_episodes):
        s = 2
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
                a = _argmax_selectable(&q[s, 0])
            else:
                coin = pol_rng.next_double(pol_rng.state)
                if coin <= w_rl:
                    if pol_rng.next_double(pol_rng.state) < epsilon:
                        a = <int>(pol_rng.next_double(pol_rng.state) * 6.0)
                    else:
                        a = _argmax_selectable(&q[s, 0])
                elif coin <= w_mix:
                    a = <int>suggest[s]
                else:
                    a = <int>(pol_rng.next_double(pol_rng.state) * 6.0)

            u = env_rng.next_double(env_rng.state)
            s1 = _next_state(&cdf[s, a, 0], u)
            rp1 = s1 / 6
            ei1 = (s1 % 6) / 2
            c1 = s1 % 2

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

            r = resp[rp1, a]
            r += emo[ei1]
            r += conf[c1]
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
                    target = r + gamma * _max_all(&q[s1, 0])
                q[s, a] += alpha * (target - q[s, a])

            ep_return += r
            if done:
                break
            s = s1
        out_return[ep] = ep_return
        out_length[ep] = rounds
        out_reason[ep] = reason
