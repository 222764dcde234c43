"""Per-(item, arm) sufficient statistics and confidence indices.

Counters store raw sums (sum x, sum x^2) per item/arm pair plus a pull
count per arm; empirical means and variances are derived on demand.
Index matrices are plain (n_items, n_arms) float arrays with every entry
in [0, 1]; arms must have been pulled at least once before an index is
requested.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError, StateError


@dataclass(frozen=True)
class CounterState:
    """Running sums of semi-bandit feedback.

    pull_counts[j] is the number of rounds arm j was played; sum_x[i, j]
    and sum_x_sq[i, j] accumulate the feedback and its square for item i
    under arm j. Feedback values live in [0, 1], so
    0 <= sum_x_sq <= sum_x <= pull_counts holds entrywise.
    """

    pull_counts: np.ndarray  # (n_arms,) int64
    sum_x: np.ndarray        # (n_items, n_arms)
    sum_x_sq: np.ndarray     # (n_items, n_arms)

    @classmethod
    def empty(cls, n_items: int, n_arms: int) -> "CounterState":
        if n_items < 1 or n_arms < 1:
            raise DomainError("n_items and n_arms must be positive")
        return cls(
            pull_counts=np.zeros(n_arms, dtype=np.int64),
            sum_x=np.zeros((n_items, n_arms)),
            sum_x_sq=np.zeros((n_items, n_arms)),
        )

    @property
    def n_items(self) -> int:
        return self.sum_x.shape[0]

    @property
    def n_arms(self) -> int:
        return self.sum_x.shape[1]

    def p_hat(self) -> np.ndarray:
        """Empirical means; NaN for arms never pulled."""
        n = self.pull_counts.astype(np.float64)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(n > 0, self.sum_x / n, np.nan)
        return out

    def v_hat(self) -> np.ndarray:
        """Empirical variances, clipped at 0; NaN for arms never pulled."""
        n = self.pull_counts.astype(np.float64)
        with np.errstate(invalid="ignore", divide="ignore"):
            ph = self.sum_x / n
            out = np.where(n > 0, np.maximum(self.sum_x_sq / n - ph * ph, 0.0), np.nan)
        return out


def update_counters(state: CounterState, action, feedback) -> CounterState:
    """Fold one round of feedback into the counters.

    ``action`` is the set of played arm ids and ``feedback`` the
    (n_items, len(action)) matrix observed for them, columns aligned with
    ascending arm id. Returns a new state; arms outside the action are
    untouched.
    """
    members = sorted(set(action))
    if not members:
        raise DomainError("action must be nonempty")
    if members[0] < 0 or members[-1] >= state.n_arms:
        raise DomainError(f"arm ids must lie in [0, {state.n_arms})")
    x = np.asarray(feedback, dtype=np.float64)
    if x.shape != (state.n_items, len(members)):
        raise ShapeError(
            f"feedback shape {x.shape} != {(state.n_items, len(members))}")
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError("feedback values must lie in [0, 1]")

    idx = np.asarray(members, dtype=np.intp)
    pulls = state.pull_counts.copy()
    sum_x = state.sum_x.copy()
    sum_sq = state.sum_x_sq.copy()
    pulls[idx] += 1
    sum_x[:, idx] += x
    sum_sq[:, idx] += x * x
    return CounterState(pulls, sum_x, sum_sq)


def bernstein_radius(v_hat, n, x):
    """Variance-adaptive deviation radius sqrt(2*v*x/n) + 3*x/n.

    For i.i.d. samples in [0, 1] with empirical mean m and empirical
    variance v over n draws, P(|m - mean| >= radius) <= 3*exp(-x).
    Accepts scalars or arrays (broadcast).
    """
    v_arr = np.asarray(v_hat, dtype=np.float64)
    n_arr = np.asarray(n)
    if np.any(n_arr < 1):
        raise DomainError("sample count n must be >= 1")
    if np.any(v_arr < 0):
        raise DomainError("v_hat must be nonnegative")
    if np.any(np.asarray(x) <= 0):
        raise DomainError("x must be positive")
    n_f = n_arr.astype(np.float64)
    out = np.sqrt(2.0 * v_arr * x / n_f) + 3.0 * x / n_f
    return float(out) if out.ndim == 0 else out


def bc_bonus(v_hat, n, log_t):
    """Exploration bonus of the variance-adaptive index."""
    n_f = np.asarray(n, dtype=np.float64)
    return np.sqrt(6.0 * np.asarray(v_hat) * log_t / n_f) + 9.0 * log_t / n_f


def hoeffding_bonus(n, log_t):
    """Exploration bonus of the classical index, sqrt(3*log t / (2 n))."""
    n_f = np.asarray(n, dtype=np.float64)
    return np.sqrt(3.0 * log_t / (2.0 * n_f))


def _require_sampled(state: CounterState):
    if np.any(state.pull_counts == 0):
        missing = np.flatnonzero(state.pull_counts == 0)
        raise StateError(
            f"arms {missing.tolist()} were never pulled; run the "
            "initialization phase before computing indices")


def ucb_index(state: CounterState, t: int) -> np.ndarray:
    """Variance-adaptive optimistic index matrix at round t.

    q[i, j] = min(1, p_hat + sqrt(6 * v_hat * log t / n) + 9 * log t / n),
    natural logarithm. Every arm must have been pulled at least once.
    """
    if t < 1:
        raise DomainError("round t must be >= 1")
    _require_sampled(state)
    log_t = math.log(t)
    n_f = state.pull_counts.astype(np.float64)
    ph = state.sum_x / n_f
    vh = np.maximum(state.sum_x_sq / n_f - ph * ph, 0.0)
    return np.minimum(ph + bc_bonus(vh, n_f, log_t), 1.0)


def cucb_index(state: CounterState, t: int) -> np.ndarray:
    """Classical optimistic index matrix, min(1, p_hat + sqrt(3 log t / 2n))."""
    if t < 1:
        raise DomainError("round t must be >= 1")
    _require_sampled(state)
    log_t = math.log(t)
    n_f = state.pull_counts.astype(np.float64)
    ph = state.sum_x / n_f
    return np.minimum(ph + hoeffding_bonus(n_f, log_t), 1.0)
