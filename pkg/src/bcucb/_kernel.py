"""Kernel selection: compiled episode loop when available, numpy fallback.

The compiled kernel (bcucb._speedups) covers the pmc and linear families;
logistic episodes always run on the Python kernel so that both paths stay
bit-identical (libm and numpy disagree in the last ulp of exp). Set
BCUCB_KERNEL=python|cython to force a kernel; the default "auto" prefers
the compiled one where supported.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _episode_py
from ._episode_py import (
    CORR_INDEPENDENT,
    CORR_SHARED,
    FAMILY_LINEAR,
    FAMILY_LOGISTIC,
    FAMILY_PMC,
    MODE_BUDGET_GREEDY,
    MODE_EXPLICIT_EXACT,
    POLICY_BC,
    POLICY_CUCB,
    POLICY_UNIFORM,
)
from .errors import ConfigError
from .policies import POLICY_KINDS

try:
    from . import _speedups
except ImportError:
    _speedups = None

HAVE_SPEEDUPS = _speedups is not None

_POLICY_CODES = {"bc-ucb": POLICY_BC, "cucb": POLICY_CUCB, "uniform": POLICY_UNIFORM}
_FAMILY_CODES = {"pmc": FAMILY_PMC, "linear": FAMILY_LINEAR, "logistic": FAMILY_LOGISTIC}
_CORR_CODES = {"independent": CORR_INDEPENDENT, "shared-per-arm": CORR_SHARED}


@dataclass
class EpisodePlan:
    """Array-level description of one policy/instance/oracle episode."""

    policy_code: int
    family_code: int
    c: float
    weights: np.ndarray
    params: np.ndarray
    correlation_code: int
    batch_size: int
    mode: int
    actions_padded: np.ndarray | None
    action_sizes: np.ndarray | None
    action_tuples: tuple | None


def build_plan(instance, policy: str, oracle_spec: str) -> EpisodePlan:
    """Validate a (policy, oracle, instance) combination and pack arrays."""
    if policy not in POLICY_KINDS:
        raise ConfigError(f"unknown policy {policy!r}")
    if oracle_spec not in ("greedy", "exact"):
        raise ConfigError(f"unknown oracle {oracle_spec!r}")
    if oracle_spec == "greedy" and not instance.is_budget:
        raise ConfigError("the greedy oracle requires a budget action set")

    needs_explicit = (oracle_spec == "exact" or policy == "uniform"
                      or not instance.is_budget)
    actions_padded = action_sizes = action_tuples = None
    mode = MODE_BUDGET_GREEDY
    if needs_explicit:
        mode = MODE_EXPLICIT_EXACT
        action_tuples = instance.enumerate_actions()
        n = len(action_tuples)
        batch = instance.batch_size
        actions_padded = np.full((n, batch), instance.n_arms, dtype=np.int64)
        action_sizes = np.empty(n, dtype=np.int64)
        for i, a in enumerate(action_tuples):
            actions_padded[i, :len(a)] = a
            action_sizes[i] = len(a)
        # the init phase must be able to reach every arm
        seen = np.zeros(instance.n_arms, dtype=bool)
        for a in action_tuples:
            seen[list(a)] = True
        if not seen.all():
            missing = np.flatnonzero(~seen).tolist()
            raise ConfigError(
                f"arms {missing} appear in no action; the action set "
                "cannot complete the initialization phase")

    return EpisodePlan(
        policy_code=_POLICY_CODES[policy],
        family_code=_FAMILY_CODES[instance.family.kind],
        c=float(instance.family.c),
        weights=np.ascontiguousarray(instance.family.weights),
        params=np.ascontiguousarray(instance.params),
        correlation_code=_CORR_CODES[instance.correlation],
        batch_size=instance.batch_size,
        mode=mode,
        actions_padded=actions_padded,
        action_sizes=action_sizes,
        action_tuples=action_tuples,
    )


def default_kernel() -> str:
    name = os.environ.get("BCUCB_KERNEL", "auto")
    if name not in ("auto", "python", "cython"):
        raise ConfigError(f"BCUCB_KERNEL must be auto|python|cython, got {name!r}")
    return name


def resolve_kernel(plan: EpisodePlan, kernel: str | None = None) -> str:
    """Pick the kernel that will run this plan ("python" or "cython")."""
    name = default_kernel() if kernel is None else kernel
    supported = HAVE_SPEEDUPS and plan.family_code in (FAMILY_PMC, FAMILY_LINEAR)
    if name == "auto":
        return "cython" if supported else "python"
    if name == "cython":
        if not HAVE_SPEEDUPS:
            raise ConfigError("the compiled kernel is not installed")
        if not supported:
            raise ConfigError(
                "the compiled kernel does not cover this reward family")
    return name


def run_plan(plan: EpisodePlan, horizon: int, rng: np.random.Generator,
             kernel: str | None = None) -> np.ndarray:
    """Execute the episode loop; returns (horizon, batch) padded actions."""
    name = resolve_kernel(plan, kernel)
    if name == "cython":
        return _speedups.run_episode_loop(plan, horizon, rng)
    return _episode_py.run_episode_loop(plan, horizon, rng)
