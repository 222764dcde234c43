"""Sequential decision policies sharing one init-phase skeleton.

Three kinds are shipped: "bc-ucb" (variance-adaptive index), "cucb"
(classical index) and "uniform" (uniform over the action set, sanity
baseline). While any arm is unsampled, every kind plays init batches
that pack as many unsampled arms as the action set allows, lowest ids
first; afterwards the index policies hand an optimistic evaluate to the
oracle, and the uniform policy draws from the seeded generator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, ShapeError
from .rewards import batch_value
from .stats import CounterState, cucb_index, ucb_index, update_counters

POLICY_KINDS = ("bc-ucb", "cucb", "uniform")


@dataclass(frozen=True)
class PolicyState:
    """Counters plus the round clock t (starts at 1, includes init rounds)."""

    kind: str
    counters: CounterState
    t: int = 1


def new_policy_state(kind: str, n_items: int, n_arms: int) -> PolicyState:
    if kind not in POLICY_KINDS:
        raise DomainError(f"unknown policy kind {kind!r}")
    return PolicyState(kind=kind, counters=CounterState.empty(n_items, n_arms))


def _init_action(state: PolicyState, instance, unsampled: np.ndarray) -> tuple:
    if instance.is_budget:
        return tuple(int(j) for j in unsampled[:instance.batch_size])
    best_action = None
    best_score = 0
    flags = state.counters.pull_counts == 0
    for a in instance.actions:
        score = sum(1 for j in a if flags[j])
        if score > best_score:
            best_action, best_score = a, score
    if best_action is None:
        raise ConfigError(
            f"arms {unsampled.tolist()} appear in no action; the action "
            "set cannot complete the initialization phase")
    return best_action


def select_action(state: PolicyState, instance, oracle, rng=None) -> tuple:
    """Choose this round's action; deterministic given (state, oracle).

    While any arm is unsampled, returns an init batch containing
    unsampled arms. Afterwards, index policies return
    oracle(evaluate-at-index) and the uniform policy picks uniformly
    from the enumerated action set using ``rng``.
    """
    unsampled = np.flatnonzero(state.counters.pull_counts == 0)
    if unsampled.size:
        return _init_action(state, instance, unsampled)

    if state.kind == "uniform":
        if rng is None:
            raise DomainError("the uniform policy needs the run's generator")
        actions = instance.enumerate_actions()
        u = rng.random()
        idx = min(int(u * len(actions)), len(actions) - 1)
        return actions[idx]

    if state.kind == "bc-ucb":
        q = ucb_index(state.counters, state.t)
    elif state.kind == "cucb":
        q = cucb_index(state.counters, state.t)
    else:
        raise DomainError(f"unknown policy kind {state.kind!r}")
    evaluate = lambda a: batch_value(instance.family, q, a)
    return oracle(evaluate)


def observe(state: PolicyState, action, feedback) -> PolicyState:
    """Fold the round's feedback into the counters and advance the clock."""
    feedback = np.asarray(feedback, dtype=np.float64)
    if feedback.shape != (state.counters.n_items, len(tuple(action))):
        raise ShapeError(
            f"feedback shape {feedback.shape} does not match "
            f"({state.counters.n_items}, {len(tuple(action))})")
    return PolicyState(kind=state.kind,
                       counters=update_counters(state.counters, action, feedback),
                       t=state.t + 1)
