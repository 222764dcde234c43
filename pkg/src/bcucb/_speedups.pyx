# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled episode loop for the pmc and linear families.

Mirrors bcucb._episode_py operation for operation; both kernels consume
the same bit-generator stream and use the same expression order (the
build disables FMA contraction), so trajectories are bit-identical.
The logistic family is routed to the Python kernel by the dispatcher.
"""
from libc.math cimport log, sqrt

from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

import numpy as np

cimport numpy as cnp

from .errors import ConfigError

cnp.import_array()

ctypedef cnp.int64_t i64

DEF POLICY_BC = 0
DEF POLICY_CUCB = 1
DEF POLICY_UNIFORM = 2
DEF FAMILY_PMC = 0
DEF FAMILY_LINEAR = 1
DEF CORR_INDEPENDENT = 0
DEF MODE_BUDGET_GREEDY = 0
DEF MODE_EXPLICIT_EXACT = 1

SUPPORTED_FAMILIES = (FAMILY_PMC, FAMILY_LINEAR)


def run_episode_loop(plan, horizon, rng):
    """Drop-in replacement for bcucb._episode_py.run_episode_loop."""
    cdef const double[:, ::1] params = plan.params
    cdef const double[::1] w = plan.weights
    cdef Py_ssize_t n_items = params.shape[0]
    cdef Py_ssize_t n_arms = params.shape[1]
    cdef int batch = plan.batch_size
    cdef int policy = plan.policy_code
    cdef int family = plan.family_code
    cdef int correlation = plan.correlation_code
    cdef int explicit = 1 if plan.mode == MODE_EXPLICIT_EXACT else 0
    cdef Py_ssize_t horizon_c = horizon

    if family not in SUPPORTED_FAMILIES:
        raise ValueError("compiled kernel supports only the pmc and linear families")

    cdef const i64[:, ::1] act_idx
    cdef const i64[::1] act_size
    cdef Py_ssize_t n_actions = 0
    if explicit:
        act_idx = plan.actions_padded
        act_size = plan.action_sizes
        n_actions = act_idx.shape[0]

    capsule = rng.bit_generator.capsule
    cdef bitgen_t *bg = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")

    out_arr = np.full((horizon, batch), -1, dtype=np.int64)
    cdef i64[:, ::1] out = out_arr
    pulls_arr = np.zeros(n_arms, dtype=np.int64)
    cdef i64[::1] pulls = pulls_arr
    sum_x_arr = np.zeros((n_items, n_arms))
    cdef double[:, ::1] sum_x = sum_x_arr
    sum_sq_arr = np.zeros((n_items, n_arms))
    cdef double[:, ::1] sum_sq = sum_sq_arr
    q_arr = np.empty((n_items, n_arms))
    cdef double[:, ::1] q = q_arr
    aux_arr = np.empty(n_items)          # pmc: running product; linear: running sum
    cdef double[::1] aux = aux_arr
    act_arr = np.empty(batch, dtype=np.int64)
    cdef i64[::1] act = act_arr
    u_arr = np.empty(batch)
    cdef double[::1] u_buf = u_arr
    chosen_arr = np.zeros(n_arms, dtype=np.int64)
    cdef i64[::1] chosen = chosen_arr

    cdef Py_ssize_t t, i, j, jj, kk, s, step, a, k, best, tmp_i
    cdef Py_ssize_t best_a
    cdef double lt, nj, ph, vh, bonus, qv, v, best_v, pr, acc, u, x
    cdef i64 score, best_score
    cdef bint any_unsampled

    for t in range(1, horizon_c + 1):
        any_unsampled = False
        for j in range(n_arms):
            if pulls[j] == 0:
                any_unsampled = True
                break

        if any_unsampled:
            if not explicit:
                k = 0
                for j in range(n_arms):
                    if pulls[j] == 0:
                        act[k] = j
                        k += 1
                        if k == batch:
                            break
            else:
                best_a = -1
                best_score = 0
                for a in range(n_actions):
                    score = 0
                    for s in range(act_size[a]):
                        if pulls[act_idx[a, s]] == 0:
                            score += 1
                    if score > best_score:
                        best_a = a
                        best_score = score
                if best_a < 0:
                    raise ConfigError(
                        "some arm appears in no action; the action set "
                        "cannot complete the initialization phase")
                k = act_size[best_a]
                for s in range(k):
                    act[s] = act_idx[best_a, s]
        elif policy == POLICY_UNIFORM:
            u = bg.next_double(bg.state)
            a = <Py_ssize_t> (u * n_actions)
            if a > n_actions - 1:
                a = n_actions - 1
            k = act_size[a]
            for s in range(k):
                act[s] = act_idx[a, s]
        else:
            lt = log(<double> t)
            for j in range(n_arms):
                nj = <double> pulls[j]
                for i in range(n_items):
                    ph = sum_x[i, j] / nj
                    if policy == POLICY_BC:
                        vh = sum_sq[i, j] / nj - ph * ph
                        if vh < 0.0:
                            vh = 0.0
                        bonus = sqrt(6.0 * vh * lt / nj) + 9.0 * lt / nj
                    else:
                        bonus = sqrt(3.0 * lt / (2.0 * nj))
                    qv = ph + bonus
                    if qv > 1.0:
                        qv = 1.0
                    q[i, j] = qv

            if not explicit:
                # greedy over the budget set; first maximizer wins
                for i in range(n_items):
                    aux[i] = 1.0 if family == FAMILY_PMC else 0.0
                for j in range(n_arms):
                    chosen[j] = 0
                for step in range(batch):
                    best = -1
                    best_v = 0.0
                    for j in range(n_arms):
                        if chosen[j]:
                            continue
                        v = 0.0
                        if family == FAMILY_PMC:
                            for i in range(n_items):
                                v += w[i] * (1.0 - aux[i] * (1.0 - q[i, j]))
                        else:
                            for i in range(n_items):
                                v += w[i] * (aux[i] + q[i, j])
                        if best < 0 or v > best_v:
                            best = j
                            best_v = v
                    act[step] = best
                    chosen[best] = 1
                    if family == FAMILY_PMC:
                        for i in range(n_items):
                            aux[i] *= 1.0 - q[i, best]
                    else:
                        for i in range(n_items):
                            aux[i] += q[i, best]
                k = batch
            else:
                best_a = -1
                best_v = 0.0
                for a in range(n_actions):
                    v = 0.0
                    for i in range(n_items):
                        if family == FAMILY_PMC:
                            pr = 1.0
                            for s in range(act_size[a]):
                                pr *= 1.0 - q[i, act_idx[a, s]]
                            v += w[i] * (1.0 - pr)
                        else:
                            acc = 0.0
                            for s in range(act_size[a]):
                                acc += q[i, act_idx[a, s]]
                            v += w[i] * acc
                    if best_a < 0 or v > best_v:
                        best_a = a
                        best_v = v
                k = act_size[best_a]
                for s in range(k):
                    act[s] = act_idx[best_a, s]

        # ascending arm order (insertion sort; k is small)
        for s in range(1, k):
            tmp_i = act[s]
            jj = s
            while jj > 0 and act[jj - 1] > tmp_i:
                act[jj] = act[jj - 1]
                jj -= 1
            act[jj] = tmp_i

        # feedback draws in the same order as the fallback kernel
        if correlation == CORR_INDEPENDENT:
            for i in range(n_items):
                for kk in range(k):
                    u = bg.next_double(bg.state)
                    j = act[kk]
                    x = 1.0 if u < params[i, j] else 0.0
                    sum_x[i, j] += x
                    sum_sq[i, j] += x * x
        else:
            for kk in range(k):
                u_buf[kk] = bg.next_double(bg.state)
            for i in range(n_items):
                for kk in range(k):
                    j = act[kk]
                    x = 1.0 if u_buf[kk] < params[i, j] else 0.0
                    sum_x[i, j] += x
                    sum_sq[i, j] += x * x
        for kk in range(k):
            pulls[act[kk]] += 1
            out[t - 1, kk] = act[kk]

    return out_arr
