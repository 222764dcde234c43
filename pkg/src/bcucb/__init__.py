"""bcucb: combinatorial semi-bandit simulation with variance-adaptive
confidence indices, smoothness certification and regret-bound evaluators.
"""
from ._kernel import HAVE_SPEEDUPS
from .environments import (ProblemInstance, bernoulli_kl,
                           build_lower_bound_instance, compute_gaps,
                           expected_reward, load_instance, sample_feedback,
                           save_instance)
from .oracles import exact_oracle, greedy_oracle
from .policies import PolicyState, new_policy_state, observe, select_action
from .presets import PRESETS, get_preset
from .rewards import RewardFamily
from .simulator import (RegretCurve, Trajectory, aggregate,
                        approximation_regret, derive_seed, regret_bound,
                        run_episode)
from .smoothness import (SmoothnessParams, closed_form_smoothness,
                         estimate_smoothness, sensitivity_gap)
from .stats import (CounterState, bernstein_radius, cucb_index, ucb_index,
                    update_counters)

__version__ = "0.1.0"

__all__ = [
    "CounterState", "HAVE_SPEEDUPS", "PRESETS", "PolicyState",
    "ProblemInstance", "RegretCurve", "RewardFamily", "SmoothnessParams",
    "Trajectory", "aggregate", "approximation_regret", "bernoulli_kl",
    "bernstein_radius", "build_lower_bound_instance", "closed_form_smoothness",
    "compute_gaps", "cucb_index", "derive_seed", "estimate_smoothness",
    "exact_oracle", "expected_reward", "get_preset", "greedy_oracle",
    "load_instance", "new_policy_state", "observe", "regret_bound",
    "run_episode", "sample_feedback", "save_instance", "select_action",
    "sensitivity_gap", "ucb_index", "update_counters",
]
