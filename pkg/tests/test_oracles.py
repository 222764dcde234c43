import itertools
import math

import numpy as np
import pytest

from bcucb.errors import DomainError
from bcucb.oracles import exact_oracle, greedy_oracle, make_oracle
from bcucb.rewards import RewardFamily, batch_value


def pmc_evaluate(params, weights=None):
    fam = RewardFamily("pmc", weights=np.ones(params.shape[0])
                       if weights is None else np.asarray(weights))
    return lambda a: batch_value(fam, params, a)


class TestGreedyOracle:
    def test_identical_arms_lowest_ids(self):
        evaluate = lambda a: float(len(a))
        assert greedy_oracle(evaluate, 6, 3) == (0, 1, 2)

    def test_worked_coverage_example(self):
        # 3 items; arm 0 covers items {0,1} surely, arm 1 covers item {2}
        # surely, arm 2 covers every item w.p. 0.9
        params = np.array([
            [1.0, 0.0, 0.9],
            [1.0, 0.0, 0.9],
            [0.0, 1.0, 0.9],
        ])
        evaluate = pmc_evaluate(params)
        picked = greedy_oracle(evaluate, 3, 2)
        assert picked == (0, 2)
        assert evaluate(picked) == pytest.approx(2.9, rel=1e-12)
        best = max(itertools.combinations(range(3), 2), key=evaluate)
        assert best == (0, 1)
        assert evaluate(best) == pytest.approx(3.0, rel=1e-12)
        assert evaluate(picked) >= (1 - 1 / math.e) * evaluate(best)

    def test_modular_function_reduces_to_top_k(self):
        rng = np.random.default_rng(3)
        weights = rng.random(8)
        evaluate = lambda a: float(sum(weights[j] for j in a))
        picked = greedy_oracle(evaluate, 8, 3)
        assert picked == tuple(sorted(np.argsort(-weights)[:3]))

    def test_batch_larger_than_arms_rejected(self):
        with pytest.raises(DomainError):
            greedy_oracle(lambda a: 0.0, 2, 3)

    def test_deterministic(self):
        rng = np.random.default_rng(7)
        params = rng.random((3, 7))
        evaluate = pmc_evaluate(params)
        assert greedy_oracle(evaluate, 7, 3) == greedy_oracle(evaluate, 7, 3)

    def test_approximation_ratio_random_instances(self):
        rng = np.random.default_rng(29)
        for _ in range(50):
            n_arms = int(rng.integers(2, 11))
            k = int(rng.integers(1, min(3, n_arms) + 1))
            m = int(rng.integers(1, 5))
            params = rng.random((m, n_arms))
            evaluate = pmc_evaluate(params)
            greedy_val = evaluate(greedy_oracle(evaluate, n_arms, k))
            actions = [a for s in range(1, k + 1)
                       for a in itertools.combinations(range(n_arms), s)]
            opt = max(evaluate(a) for a in actions)
            assert greedy_val >= (1 - 1 / math.e) * opt - 1e-12


class TestExactOracle:
    def test_single_action(self):
        assert exact_oracle(lambda a: 1.0, [(2, 4)]) == (2, 4)

    def test_tie_breaks_lexicographically(self):
        actions = [(0, 2), (0, 1), (1, 2)]
        actions.sort()
        assert exact_oracle(lambda a: 5.0, actions) == (0, 1)

    def test_empty_list_rejected(self):
        with pytest.raises(DomainError):
            exact_oracle(lambda a: 0.0, [])

    def test_matches_independent_scan(self):
        rng = np.random.default_rng(13)
        params = rng.random((2, 10))
        evaluate = pmc_evaluate(params)
        actions = sorted(itertools.combinations(range(10), 2))[:50]
        picked = exact_oracle(evaluate, actions)
        best, best_v = None, -math.inf
        for a in actions:  # independent linear scan
            v = evaluate(a)
            if v > best_v:
                best, best_v = a, v
        assert picked == best


class TestMakeOracle:
    def test_greedy_requires_budget(self):
        from bcucb.environments import build_lower_bound_instance
        inst = build_lower_bound_instance(5, 2, 0.1)
        with pytest.raises(DomainError):
            make_oracle("greedy", inst)
        oracle = make_oracle("exact", inst)
        evaluate = lambda a: batch_value(inst.family, inst.params, a)
        assert oracle(evaluate) == (0, 4)

    def test_unknown_spec(self):
        from bcucb.environments import build_lower_bound_instance
        with pytest.raises(DomainError):
            make_oracle("lazy", build_lower_bound_instance(5, 2, 0.1))
