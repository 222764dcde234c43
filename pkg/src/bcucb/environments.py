"""Problem instances: parameters, action sets, feedback sampling and gaps.

An instance bundles a reward family, an (n_items, n_arms) matrix of
Bernoulli means, and an action set that is either a size budget (every
nonempty arm subset of size <= batch_size) or an explicit list of arm
sets. Arm ids are 0-based everywhere, including the JSON schema.

Feedback is Bernoulli per (item, arm) pair. Two correlation modes exist:
``independent`` draws every entry separately; ``shared-per-arm`` draws a
single uniform per arm and thresholds it against every item's mean, so
all items of one arm move together (marginals are unchanged).
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ConfigError, DomainError
from .rewards import FAMILY_KINDS, RewardFamily, batch_value

INSTANCE_SCHEMA = "bcucb-instance/1"
CORRELATIONS = ("independent", "shared-per-arm")
DEFAULT_ENUMERATION_GUARD = 10**6


class ProblemInstance:
    """Immutable semi-bandit problem description.

    Args:
        family: reward family (kind, logistic constant, item weights).
        params: (n_items, n_arms) matrix of means in [0, 1].
        batch_size: maximum arms per action.
        actions: explicit action list (iterables of arm ids), or None for
            the budget action set of all nonempty subsets of size
            <= batch_size.
        correlation: "independent" or "shared-per-arm".
    """

    def __init__(self, family: RewardFamily, params, batch_size: int,
                 actions=None, correlation: str = "independent"):
        params = np.asarray(params, dtype=np.float64)
        if params.ndim != 2:
            raise DomainError("params must be a 2-d (n_items, n_arms) matrix")
        if params.shape[0] != family.n_items:
            raise DomainError(
                f"params has {params.shape[0]} item rows but the family "
                f"carries {family.n_items} weights")
        if np.any(params < 0) or np.any(params > 1):
            raise DomainError("parameter entries must lie in [0, 1]")
        if batch_size < 1:
            raise DomainError("batch_size must be >= 1")
        if correlation not in CORRELATIONS:
            raise DomainError(f"unknown correlation mode {correlation!r}")

        n_arms = params.shape[1]
        if actions is None:
            if batch_size > n_arms:
                raise DomainError("budget batch_size cannot exceed the arm count")
            canonical = None
        else:
            canonical = []
            for a in actions:
                a = tuple(sorted(int(j) for j in a))
                if not a:
                    raise DomainError("explicit actions must be nonempty")
                if len(set(a)) != len(a):
                    raise DomainError(f"action {a} repeats an arm")
                if a[0] < 0 or a[-1] >= n_arms:
                    raise DomainError(f"action {a} uses arm ids outside [0, {n_arms})")
                if len(a) > batch_size:
                    raise DomainError(f"action {a} exceeds batch_size {batch_size}")
                canonical.append(a)
            if not canonical:
                raise DomainError("explicit action list must be nonempty")
            canonical = tuple(canonical)

        self.family = family
        self.params = params
        self.params.setflags(write=False)
        self.batch_size = batch_size
        self.actions = canonical
        self.correlation = correlation
        self._enumerated = None
        self._optimum = None

    @property
    def n_items(self) -> int:
        return self.params.shape[0]

    @property
    def n_arms(self) -> int:
        return self.params.shape[1]

    @property
    def weights(self) -> np.ndarray:
        return self.family.weights

    @property
    def total_weight(self) -> float:
        return self.family.total_weight

    @property
    def is_budget(self) -> bool:
        return self.actions is None

    def enumerate_actions(self, guard: int = DEFAULT_ENUMERATION_GUARD):
        """All actions in ascending lexicographic order of sorted arm ids.

        Budget sets are expanded to every nonempty subset of size up to
        batch_size; raises CapacityError when the expansion would exceed
        ``guard`` actions.
        """
        if self.actions is not None:
            return self.actions
        if self._enumerated is None:
            count = sum(math.comb(self.n_arms, k)
                        for k in range(1, self.batch_size + 1))
            if count > guard:
                raise CapacityError(
                    f"budget action set holds {count} actions (> {guard})")
            combos = []
            for k in range(1, self.batch_size + 1):
                combos.extend(itertools.combinations(range(self.n_arms), k))
            combos.sort()
            self._enumerated = tuple(combos)
        return self._enumerated

    def contains_action(self, action) -> bool:
        a = tuple(sorted(int(j) for j in action))
        if self.actions is not None:
            return a in set(self.actions)
        return (0 < len(a) <= self.batch_size
                and len(set(a)) == len(a)
                and all(0 <= j < self.n_arms for j in a))

    def optimal_value(self, guard: int = DEFAULT_ENUMERATION_GUARD) -> float:
        """Best achievable expected reward (exhaustive, capacity-guarded)."""
        if self._optimum is None:
            best = -math.inf
            for a in self.enumerate_actions(guard):
                v = batch_value(self.family, self.params, a)
                if v > best:
                    best = v
            self._optimum = best
        return self._optimum

    def to_dict(self) -> dict:
        d = {
            "schema": INSTANCE_SCHEMA,
            "family": self.family.kind,
            "L": self.n_arms,
            "K": self.batch_size,
            "M": self.n_items,
            "weights": self.family.weights.tolist(),
            "params": self.params.tolist(),
            "correlation": self.correlation,
        }
        if self.family.kind == "logistic":
            d["c"] = self.family.c
        if self.actions is None:
            d["action_set"] = {"type": "budget"}
        else:
            d["action_set"] = {"type": "explicit",
                               "actions": [list(a) for a in self.actions]}
        return d

    def content_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


def instance_from_dict(d: dict) -> ProblemInstance:
    """Inverse of ProblemInstance.to_dict; raises ConfigError on bad input."""
    try:
        if d.get("schema") != INSTANCE_SCHEMA:
            raise ConfigError(
                f"unsupported instance schema {d.get('schema')!r}")
        kind = d["family"]
        if kind not in FAMILY_KINDS:
            raise ConfigError(f"unknown reward family {kind!r}")
        family = RewardFamily(kind=kind, c=float(d.get("c", 1.0)),
                              weights=np.asarray(d["weights"], dtype=np.float64))
        aset = d["action_set"]
        actions = None
        if aset["type"] == "explicit":
            actions = aset["actions"]
        elif aset["type"] != "budget":
            raise ConfigError(f"unknown action_set type {aset['type']!r}")
        instance = ProblemInstance(
            family=family,
            params=d["params"],
            batch_size=int(d["K"]),
            actions=actions,
            correlation=d.get("correlation", "independent"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed instance document: {exc}") from exc
    if instance.n_arms != int(d["L"]) or instance.n_items != int(d["M"]):
        raise ConfigError("instance document L/M fields disagree with params shape")
    return instance


def save_instance(instance: ProblemInstance, path):
    with open(path, "w") as fh:
        json.dump(instance.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_instance(path) -> ProblemInstance:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"instance file is not valid JSON: {exc}") from exc
    return instance_from_dict(d)


def expected_reward(instance: ProblemInstance, action) -> float:
    """Exact expected reward r(A; p) of an action under the true means."""
    if not instance.contains_action(action):
        raise DomainError(f"action {tuple(action)} is not in the action set")
    return batch_value(instance.family, instance.params, action)


def sample_feedback(instance: ProblemInstance, action, rng: np.random.Generator):
    """One round of Bernoulli feedback for the played action.

    Returns an (n_items, len(action)) 0/1 matrix with columns aligned to
    ascending arm id. Feedback for arms outside the action is not
    represented at all.
    """
    members = np.asarray(sorted(set(int(j) for j in action)), dtype=np.intp)
    if not instance.contains_action(members):
        raise DomainError(f"action {tuple(members)} is not in the action set")
    probs = instance.params[:, members]
    if instance.correlation == "independent":
        u = rng.random((instance.n_items, members.size))
    else:
        u = rng.random(members.size)[None, :]
    return (u < probs).astype(np.float64)


@dataclass(frozen=True)
class GapTable:
    """Exhaustive suboptimality gaps of an instance at oracle factors (alpha, beta).

    ``delta[i]`` is alpha * r_max - value of ``actions[i]``. Per-arm
    minima/maxima run over positive-gap actions containing the arm and
    are NaN for arms that appear in none.
    """

    actions: tuple
    values: np.ndarray
    delta: np.ndarray
    delta_j_min: np.ndarray
    delta_j_max: np.ndarray
    delta_max: float
    r_max: float
    optimal_action: tuple
    alpha: float
    beta: float

    def to_dict(self) -> dict:
        def clean(v):
            return None if math.isnan(v) else v
        return {
            "r_max": self.r_max,
            "optimal_action": list(self.optimal_action),
            "alpha": self.alpha,
            "beta": self.beta,
            "delta_max": self.delta_max,
            "per_arm": [
                {"arm": j,
                 "delta_min": clean(float(self.delta_j_min[j])),
                 "delta_max": clean(float(self.delta_j_max[j]))}
                for j in range(len(self.delta_j_min))
            ],
        }


def compute_gaps(instance: ProblemInstance, alpha: float = 1.0,
                 beta: float = 1.0,
                 guard: int = DEFAULT_ENUMERATION_GUARD) -> GapTable:
    """Exact gap table via exhaustive enumeration of the action set."""
    if not 0.0 < alpha <= 1.0 or not 0.0 < beta <= 1.0:
        raise DomainError("alpha and beta must lie in (0, 1]")
    actions = instance.enumerate_actions(guard)
    values = np.array([batch_value(instance.family, instance.params, a)
                       for a in actions])
    r_max = float(values.max())
    optimal = actions[int(np.argmax(values))]
    delta = alpha * r_max - values

    n_arms = instance.n_arms
    d_min = np.full(n_arms, np.nan)
    d_max = np.full(n_arms, np.nan)
    for a, d in zip(actions, delta):
        if d <= 0.0:
            continue
        for j in a:
            if math.isnan(d_min[j]) or d < d_min[j]:
                d_min[j] = d
            if math.isnan(d_max[j]) or d > d_max[j]:
                d_max[j] = d
    positive = delta[delta > 0.0]
    delta_max = float(positive.max()) if positive.size else 0.0
    return GapTable(actions=actions, values=values, delta=delta,
                    delta_j_min=d_min, delta_j_max=d_max,
                    delta_max=delta_max, r_max=r_max,
                    optimal_action=optimal, alpha=alpha, beta=beta)


def build_lower_bound_instance(n_arms: int, batch_size: int, epsilon: float,
                               weights=(1.0,)) -> ProblemInstance:
    """Coverage instance that reduces to a scaled Bernoulli bandit.

    The first batch_size - 1 arms never cover anything; the remaining
    arms cover every item with probability 1/2 - epsilon, except the last
    arm at exactly 1/2. The action set is {A_j}, where A_j plays all the
    empty arms plus the j-th nonempty one, and all items share a single
    draw per arm, so each round's realized reward is either 0 or the
    total item weight.
    """
    if batch_size < 1 or n_arms <= batch_size:
        raise DomainError("need n_arms > batch_size >= 1")
    if not 0.0 < epsilon < 0.5:
        raise DomainError("epsilon must lie in (0, 1/2)")
    w = np.asarray(weights, dtype=np.float64)
    family = RewardFamily(kind="pmc", weights=w)
    m = w.size
    params = np.zeros((m, n_arms))
    params[:, batch_size - 1:n_arms - 1] = 0.5 - epsilon
    params[:, n_arms - 1] = 0.5
    prefix = tuple(range(batch_size - 1))
    actions = [prefix + (batch_size - 1 + j,)
               for j in range(n_arms - batch_size + 1)]
    return ProblemInstance(family=family, params=params,
                           batch_size=batch_size, actions=actions,
                           correlation="shared-per-arm")


def bernoulli_kl(p: float, q: float) -> float:
    """KL divergence between Bernoulli(p) and Bernoulli(q), p, q in (0, 1)."""
    if not 0.0 < p < 1.0 or not 0.0 < q < 1.0:
        raise DomainError("bernoulli_kl requires p, q in the open interval (0, 1)")
    return p * math.log(p / q) + (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
