"""Pure-numpy episode loop; reference implementation of the hot kernel.

The compiled kernel in bcucb._speedups mirrors this loop operation for
operation: identical index formulas (same association order, no FMA),
identical first-maximizer tie-breaking, and identical uniform-draw order
from the shared bit generator, so both kernels produce bit-identical
trajectories. Any change here must be reflected there.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError

# codes shared with the compiled kernel
POLICY_BC, POLICY_CUCB, POLICY_UNIFORM = 0, 1, 2
FAMILY_PMC, FAMILY_LINEAR, FAMILY_LOGISTIC = 0, 1, 2
CORR_INDEPENDENT, CORR_SHARED = 0, 1
MODE_BUDGET_GREEDY, MODE_EXPLICIT_EXACT = 0, 1


def run_episode_loop(plan, horizon: int, rng: np.random.Generator) -> np.ndarray:
    """Run ``horizon`` rounds and return the played actions.

    Returns an (horizon, batch_size) int64 array of sorted arm ids,
    padded with -1 on the right for batches smaller than batch_size.
    """
    params = plan.params
    n_items, n_arms = params.shape
    batch = plan.batch_size
    explicit = plan.mode == MODE_EXPLICIT_EXACT
    if explicit:
        idx = plan.actions_padded            # (n_actions, batch) pad -> n_arms
        n_actions = idx.shape[0]

    pulls = np.zeros(n_arms, dtype=np.int64)
    sum_x = np.zeros((n_items, n_arms))
    sum_sq = np.zeros((n_items, n_arms))
    out = np.full((horizon, batch), -1, dtype=np.int64)

    for t in range(1, horizon + 1):
        if np.any(pulls == 0):
            action = _init_action(pulls, plan, explicit)
        elif plan.policy_code == POLICY_UNIFORM:
            u = rng.random()
            a_idx = min(int(u * n_actions), n_actions - 1)
            action = idx[a_idx, :plan.action_sizes[a_idx]].copy()
        else:
            q = _index_matrix(pulls, sum_x, sum_sq, plan.policy_code, t)
            if explicit:
                a_idx = _best_explicit(q, plan)
                action = idx[a_idx, :plan.action_sizes[a_idx]].copy()
            else:
                action = _greedy(q, plan)
        action = np.sort(action)
        k = action.size

        if plan.correlation_code == CORR_INDEPENDENT:
            u = rng.random((n_items, k))
        else:
            u = rng.random(k)[None, :]
        x = (u < params[:, action]).astype(np.float64)

        pulls[action] += 1
        sum_x[:, action] += x
        sum_sq[:, action] += x * x
        out[t - 1, :k] = action
    return out


def _init_action(pulls, plan, explicit):
    if not explicit:
        return np.flatnonzero(pulls == 0)[:plan.batch_size]
    # pad column counts as sampled so it never scores
    pulls_aug = np.concatenate([pulls, np.ones(1, dtype=np.int64)])
    scores = (pulls_aug[plan.actions_padded] == 0).sum(axis=1)
    if scores.max() == 0:
        raise ConfigError(
            "some arm appears in no action; the action set cannot "
            "complete the initialization phase")
    a_idx = int(np.argmax(scores))
    return plan.actions_padded[a_idx, :plan.action_sizes[a_idx]].copy()


def _index_matrix(pulls, sum_x, sum_sq, policy_code, t):
    log_t = math.log(t)
    n_f = pulls.astype(np.float64)
    ph = sum_x / n_f
    if policy_code == POLICY_BC:
        vh = np.maximum(sum_sq / n_f - ph * ph, 0.0)
        bonus = np.sqrt(6.0 * vh * log_t / n_f) + 9.0 * log_t / n_f
    else:
        bonus = np.sqrt(3.0 * log_t / (2.0 * n_f))
    return np.minimum(ph + bonus, 1.0)


def _greedy(q, plan):
    """Greedy batch of exactly batch_size arms; first maximizer wins."""
    n_items, n_arms = q.shape
    w = plan.weights
    chosen = np.zeros(n_arms, dtype=bool)
    picked = np.empty(plan.batch_size, dtype=np.int64)
    if plan.family_code == FAMILY_PMC:
        prod = np.ones(n_items)
        for step in range(plan.batch_size):
            vals = np.zeros(n_arms)
            for i in range(n_items):
                vals += w[i] * (1.0 - prod[i] * (1.0 - q[i]))
            vals[chosen] = -1.0
            j = int(np.argmax(vals))
            picked[step] = j
            chosen[j] = True
            prod *= 1.0 - q[:, j]
    elif plan.family_code == FAMILY_LINEAR:
        base = np.zeros(n_items)
        for step in range(plan.batch_size):
            vals = np.zeros(n_arms)
            for i in range(n_items):
                vals += w[i] * (base[i] + q[i])
            vals[chosen] = -1.0
            j = int(np.argmax(vals))
            picked[step] = j
            chosen[j] = True
            base += q[:, j]
    else:
        ssum = np.zeros(n_items)
        for step in range(plan.batch_size):
            vals = np.zeros(n_arms)
            for i in range(n_items):
                vals += w[i] / (1.0 + plan.c * np.exp(-(ssum[i] + q[i])))
            vals[chosen] = -1.0
            j = int(np.argmax(vals))
            picked[step] = j
            chosen[j] = True
            ssum += q[:, j]
    return picked


def _best_explicit(q, plan):
    """Index of the best action in the explicit list; first maximizer wins."""
    idx = plan.actions_padded
    n_actions, batch = idx.shape
    w = plan.weights
    n_items = q.shape[0]
    vals = np.zeros(n_actions)
    if plan.family_code == FAMILY_PMC:
        # pad column: 1 - q = 1, a no-op factor
        om_aug = np.concatenate([1.0 - q, np.ones((n_items, 1))], axis=1)
        for i in range(n_items):
            pr = np.ones(n_actions)
            for s in range(batch):
                pr = pr * om_aug[i, idx[:, s]]
            vals += w[i] * (1.0 - pr)
    elif plan.family_code == FAMILY_LINEAR:
        q_aug = np.concatenate([q, np.zeros((n_items, 1))], axis=1)
        for i in range(n_items):
            acc = np.zeros(n_actions)
            for s in range(batch):
                acc = acc + q_aug[i, idx[:, s]]
            vals += w[i] * acc
    else:
        q_aug = np.concatenate([q, np.zeros((n_items, 1))], axis=1)
        for i in range(n_items):
            acc = np.zeros(n_actions)
            for s in range(batch):
                acc = acc + q_aug[i, idx[:, s]]
            vals += w[i] / (1.0 + plan.c * np.exp(-acc))
    return int(np.argmax(vals))
