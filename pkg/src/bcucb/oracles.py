"""Maximization oracles mapping a set-value function to an action.

Both oracles are deterministic: ties break toward the lowest arm id
(greedy) or the earliest action in the supplied list (exact), so repeated
runs reproduce exactly and the success probability bookkeeping can use
beta = 1.
"""
from __future__ import annotations

import math

from .errors import DomainError


def greedy_oracle(evaluate, n_arms: int, batch_size: int) -> tuple:
    """Sequential greedy maximization over the budget action set.

    Starts from the empty set and adds, one at a time, the arm whose
    inclusion maximizes ``evaluate`` (first maximizer wins). Always
    returns exactly ``batch_size`` arms; for monotone submodular
    ``evaluate`` the value is within a factor 1 - 1/e of the optimum.
    """
    if batch_size > n_arms:
        raise DomainError("batch_size cannot exceed the number of arms")
    if batch_size < 1:
        raise DomainError("batch_size must be >= 1")
    chosen: list[int] = []
    for _ in range(batch_size):
        best_j = -1
        best_v = 0.0
        for j in range(n_arms):
            if j in chosen:
                continue
            v = evaluate(tuple(sorted(chosen + [j])))
            if best_j < 0 or v > best_v:
                best_j, best_v = j, v
        chosen.append(best_j)
    return tuple(sorted(chosen))


def exact_oracle(evaluate, actions) -> tuple:
    """Full scan over an explicit action list; first maximizer wins."""
    best_a = None
    best_v = 0.0
    for a in actions:
        v = evaluate(a)
        if best_a is None or v > best_v:
            best_a, best_v = a, v
    if best_a is None:
        raise DomainError("action list must be nonempty")
    return tuple(best_a)


ORACLE_FACTORS = {
    # (approximation factor alpha, success probability beta)
    "greedy": (1.0 - 1.0 / math.e, 1.0),
    "exact": (1.0, 1.0),
}


def make_oracle(spec: str, instance):
    """Bind an oracle spec ("greedy" | "exact") to an instance.

    Returns a callable mapping ``evaluate`` to an action. Greedy requires
    a budget action set; exact enumerates the action set (guarded).
    """
    if spec == "greedy":
        if not instance.is_budget:
            raise DomainError("the greedy oracle requires a budget action set")
        return lambda evaluate: greedy_oracle(
            evaluate, instance.n_arms, instance.batch_size)
    if spec == "exact":
        actions = instance.enumerate_actions()
        return lambda evaluate: exact_oracle(evaluate, actions)
    raise DomainError(f"unknown oracle spec {spec!r}")
