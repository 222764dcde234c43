"""Episode runner, regret accounting, bound evaluators and aggregation.

Regret is scored against exact expected rewards of the chosen actions
(never against sampled rewards), so a per-seed curve is the conditional
expectation of the approximation regret given the action sequence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernel import build_plan, run_plan
from .environments import GapTable, ProblemInstance
from .errors import DataError, DomainError
from .oracles import ORACLE_FACTORS
from .rewards import batch_value
from .smoothness import SmoothnessParams


@dataclass(frozen=True)
class Trajectory:
    """Actions of one episode plus their exact values and gaps.

    ``gaps[t]`` is alpha * r_max - value of the round-t action, with
    alpha the approximation factor of the oracle that produced the run.
    """

    policy: str
    oracle: str
    seed: int
    instance_hash: str
    horizon: int
    actions: tuple
    expected_rewards: np.ndarray
    gaps: np.ndarray
    alpha: float
    beta: float
    r_max: float


@dataclass(frozen=True)
class RegretCurve:
    """Cumulative approximation regret per round for one episode."""

    policy: str
    seed: int
    instance_hash: str
    horizon: int
    alpha: float
    beta: float
    values: np.ndarray

    @property
    def final(self) -> float:
        return float(self.values[-1])


def derive_seed(master_seed: int, episode_index: int) -> int:
    """Per-episode seed from (master seed, episode index).

    Uses one SeedSequence word so that adding further episodes never
    perturbs earlier ones.
    """
    ss = np.random.SeedSequence((int(master_seed), int(episode_index)))
    return int(ss.generate_state(1, np.uint64)[0])


def run_episode(instance: ProblemInstance, policy: str, oracle: str,
                horizon: int, seed: int, kernel: str | None = None) -> Trajectory:
    """Run one seeded episode; deterministic given all five arguments."""
    if horizon < 1:
        raise DomainError("horizon must be >= 1")
    plan = build_plan(instance, policy, oracle)
    rng = np.random.default_rng(int(seed))
    padded = run_plan(plan, horizon, rng, kernel)

    alpha, beta = ORACLE_FACTORS[oracle]
    r_max = instance.optimal_value()
    value_cache: dict[tuple, float] = {}
    actions = []
    rewards = np.empty(horizon)
    for t in range(horizon):
        row = padded[t]
        a = tuple(int(j) for j in row[row >= 0])
        v = value_cache.get(a)
        if v is None:
            v = batch_value(instance.family, instance.params, a)
            value_cache[a] = v
        actions.append(a)
        rewards[t] = v
    gaps = alpha * r_max - rewards
    return Trajectory(policy=policy, oracle=oracle, seed=int(seed),
                      instance_hash=instance.content_hash(), horizon=horizon,
                      actions=tuple(actions), expected_rewards=rewards,
                      gaps=gaps, alpha=alpha, beta=beta, r_max=r_max)


def approximation_regret(traj: Trajectory, instance: ProblemInstance,
                         alpha: float, beta: float) -> RegretCurve:
    """Cumulative curve R(t) = sum_{s<=t} (alpha*beta*r_max - r(A_s; p))."""
    if not 0.0 < alpha <= 1.0 or not 0.0 < beta <= 1.0:
        raise DomainError("alpha and beta must lie in (0, 1]")
    if traj.instance_hash != instance.content_hash():
        raise DataError("trajectory was generated on a different instance")
    r_max = instance.optimal_value()
    increments = alpha * beta * r_max - traj.expected_rewards
    return RegretCurve(policy=traj.policy, seed=traj.seed,
                       instance_hash=traj.instance_hash, horizon=traj.horizon,
                       alpha=alpha, beta=beta, values=np.cumsum(increments))


def _log_batch_factor(batch_size: int) -> int:
    """ceil(log K / 1.61), clamped below at 1.

    The literal expression is 0 at K = 1, which would wipe out the
    leading term of the problem-dependent bound; the clamp keeps the
    bound valid (it only ever increases it).
    """
    return max(1, math.ceil(math.log(batch_size) / 1.61))


def regret_bound(instance: ProblemInstance, gaps: GapTable,
                 smoothness: SmoothnessParams, horizon: int,
                 mode: str = "thm1") -> float:
    """Evaluate the regret-bound formulas at horizon T.

    mode "thm1" is the gap-dependent bound (needs per-arm min/max gaps);
    mode "cor1" is the gap-free bound. Both are monotone in T.
    """
    if horizon < 2:
        raise DomainError("bound evaluation needs horizon >= 2")
    if len(gaps.delta_j_min) != instance.n_arms:
        raise DataError("gap table does not match the instance arm count")
    g_inf, g_g = smoothness.gamma_inf, smoothness.gamma_g
    m_bar = instance.total_weight
    n_arms = instance.n_arms
    n_items = instance.n_items
    factor = _log_batch_factor(instance.batch_size)
    log_t = math.log(horizon)
    tail = n_arms * gaps.delta_max * (1.0 + n_items * 2.0 * math.pi**2 / 3.0)

    if mode == "thm1":
        inv_min = 0.0
        log_ratio = 0.0
        for j in range(n_arms):
            d_min = gaps.delta_j_min[j]
            d_max = gaps.delta_j_max[j]
            if math.isnan(d_min):
                continue
            if math.isnan(d_max):
                raise DataError(f"arm {j} has a min gap but no max gap")
            inv_min += 1.0 / d_min
            log_ratio += 1.0 + math.log(d_max / d_min)
        lead = (8640.0 * g_g**2 * m_bar**2 * inv_min
                + 340.0 * g_inf * m_bar * log_ratio)
        return lead * factor**2 * log_t + tail

    if mode == "cor1":
        u2 = 340.0 * g_inf * m_bar * n_arms * factor**2
        sqrt_term = (2.0 * math.sqrt(8640.0) * g_g * m_bar * factor
                     * math.sqrt(n_arms * horizon * log_t))
        inner = gaps.delta_max * horizon / (u2 * log_t)
        inner = max(inner, math.e)  # keep the log term nonnegative
        return sqrt_term + tail + u2 * log_t * (2.0 + math.log(inner))

    raise DomainError(f"unknown bound mode {mode!r}")


@dataclass(frozen=True)
class RegretSummary:
    policy: str
    instance_hash: str
    horizon: int
    n_curves: int
    mean: np.ndarray
    std: np.ndarray
    final_quantiles: dict


def aggregate(curves) -> RegretSummary:
    """Pointwise mean/std (population convention) and final-regret quantiles."""
    curves = list(curves)
    if not curves:
        raise DataError("aggregate needs at least one curve")
    first = curves[0]
    for c in curves[1:]:
        if (c.instance_hash, c.policy, c.horizon, c.alpha, c.beta) != (
                first.instance_hash, first.policy, first.horizon,
                first.alpha, first.beta):
            raise DataError("curves mix instances, policies or horizons")
    stacked = np.stack([c.values for c in curves])
    finals = stacked[:, -1]
    qs = (0.0, 0.25, 0.5, 0.75, 1.0)
    return RegretSummary(
        policy=first.policy, instance_hash=first.instance_hash,
        horizon=first.horizon, n_curves=len(curves),
        mean=stacked.mean(axis=0), std=stacked.std(axis=0),
        final_quantiles={str(q): float(np.quantile(finals, q)) for q in qs},
    )
