"""Shipped benchmark instances.

Parameter matrices are fixed by hand so that each preset exercises a
specific regime: "pmc-small" has mid-scale gaps (~0.1) and converges
well inside a 2e4-round horizon; "pmc-extreme" keeps every mean near the
edges of [0, 1], where variance-adaptive indices pay off; "lower-bound"
is the explicit-action coverage instance that collapses to a scaled
Bernoulli bandit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .environments import ProblemInstance, build_lower_bound_instance
from .errors import ConfigError
from .rewards import RewardFamily


@dataclass(frozen=True)
class Preset:
    name: str
    oracle: str
    policies: tuple
    build: callable

    def instance(self) -> ProblemInstance:
        return self.build()


def _pmc_small() -> ProblemInstance:
    # two strong arms, six weaker ones; smallest positive gap ~= 0.0975
    cols = [0.95, 0.95, 0.30, 0.28, 0.26, 0.24, 0.22, 0.20]
    params = np.tile(cols, (3, 1))
    family = RewardFamily(kind="pmc", weights=np.ones(3))
    return ProblemInstance(family, params, batch_size=2)


def _pmc_extreme() -> ProblemInstance:
    # one item nearly always covered (p ~ 0.98), two items with tiny
    # coverage probabilities; every mean sits near an edge of [0, 1],
    # where arm variances are far below 1/4
    params = np.array([
        [0.98, 0.98, 0.98, 0.98, 0.98, 0.98],
        [0.06, 0.06, 0.03, 0.03, 0.03, 0.03],
        [0.06, 0.06, 0.03, 0.03, 0.03, 0.03],
    ])
    family = RewardFamily(kind="pmc", weights=np.ones(3))
    return ProblemInstance(family, params, batch_size=2)


def _linear_small() -> ProblemInstance:
    params = np.array([
        [0.90, 0.80, 0.60, 0.50, 0.40, 0.30],
        [0.70, 0.60, 0.50, 0.40, 0.30, 0.20],
    ])
    family = RewardFamily(kind="linear", weights=np.array([1.0, 0.5]))
    return ProblemInstance(family, params, batch_size=2)


def _logistic_small() -> ProblemInstance:
    params = np.array([
        [0.85, 0.70, 0.55, 0.40, 0.30, 0.20],
        [0.75, 0.65, 0.50, 0.45, 0.25, 0.15],
    ])
    family = RewardFamily(kind="logistic", c=1.0, weights=np.ones(2))
    return ProblemInstance(family, params, batch_size=2)


def _lower_bound() -> ProblemInstance:
    return build_lower_bound_instance(n_arms=5, batch_size=2, epsilon=0.1,
                                      weights=(1.0,))


PRESETS = {
    "pmc-small": Preset("pmc-small", "exact", ("bc-ucb", "cucb"), _pmc_small),
    "pmc-extreme": Preset("pmc-extreme", "greedy", ("bc-ucb", "cucb"), _pmc_extreme),
    "linear-small": Preset("linear-small", "greedy", ("bc-ucb", "cucb"), _linear_small),
    "logistic-small": Preset("logistic-small", "greedy", ("bc-ucb", "cucb"), _logistic_small),
    "lower-bound": Preset("lower-bound", "exact", ("bc-ucb", "cucb"), _lower_bound),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None
