"""Reward families: per-item set functions, gradients and batch values.

Three families are shipped, all monotone in every parameter:

* ``pmc``       r_i(A; x) = 1 - prod_{j in A} (1 - x_j)
* ``linear``    r_i(A; x) = sum_{j in A} x_j
* ``logistic``  r_i(A; x) = 1 / (1 + c * exp(-sum_{j in A} x_j))

A batch reward is the weighted sum of the per-item values, evaluated on
the rows of an (n_items, n_arms) parameter matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

FAMILY_KINDS = ("pmc", "linear", "logistic")


@dataclass(frozen=True)
class RewardFamily:
    """A reward-family descriptor plus the item weights of an instance.

    Args:
        kind: one of ``pmc``, ``linear``, ``logistic``.
        c: scale constant of the logistic family (ignored otherwise).
        weights: nonnegative item weights; their sum is the reward scale.
    """

    kind: str
    c: float = 1.0
    weights: np.ndarray = field(default_factory=lambda: np.ones(1))

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise DomainError(f"unknown reward family {self.kind!r}")
        if self.kind == "logistic" and not self.c > 0:
            raise DomainError("logistic family requires c > 0")
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise DomainError("weights must be a nonempty 1-d vector")
        if np.any(w < 0):
            raise DomainError("weights must be nonnegative")
        if not w.sum() > 0:
            raise DomainError("total item weight must be positive")
        object.__setattr__(self, "weights", w)

    @property
    def n_items(self) -> int:
        return self.weights.size

    @property
    def total_weight(self) -> float:
        """Sum of the item weights (the scale of the reward)."""
        return float(self.weights.sum())


def item_value(kind: str, c: float, x: np.ndarray) -> float:
    """Value of one item function on the member parameters ``x``."""
    x = np.asarray(x, dtype=np.float64)
    if kind == "pmc":
        return float(1.0 - np.prod(1.0 - x))
    if kind == "linear":
        return float(np.sum(x))
    if kind == "logistic":
        return float(1.0 / (1.0 + c * math.exp(-float(np.sum(x)))))
    raise DomainError(f"unknown reward family {kind!r}")


def item_gradient(kind: str, c: float, x: np.ndarray) -> np.ndarray:
    """Partial derivatives of one item function at ``x`` (one per member)."""
    x = np.asarray(x, dtype=np.float64)
    if kind == "pmc":
        one_minus = 1.0 - x
        grad = np.empty_like(x)
        for j in range(x.size):
            grad[j] = np.prod(np.delete(one_minus, j))
        return grad
    if kind == "linear":
        return np.ones_like(x)
    if kind == "logistic":
        s = 1.0 / (1.0 + c * math.exp(-float(np.sum(x))))
        return np.full_like(x, s * (1.0 - s))
    raise DomainError(f"unknown reward family {kind!r}")


def gradient_matrix(kind: str, c: float, points: np.ndarray) -> np.ndarray:
    """Vectorised ``item_gradient`` over rows of an (n_points, k) array."""
    points = np.asarray(points, dtype=np.float64)
    if kind == "pmc":
        # total product divided back out; grid points keep x < 1
        total = np.prod(1.0 - points, axis=1, keepdims=True)
        return total / (1.0 - points)
    if kind == "linear":
        return np.ones_like(points)
    if kind == "logistic":
        s = 1.0 / (1.0 + c * np.exp(-points.sum(axis=1, keepdims=True)))
        return np.broadcast_to(s * (1.0 - s), points.shape).copy()
    raise DomainError(f"unknown reward family {kind!r}")


def batch_value(family: RewardFamily, params: np.ndarray, action) -> float:
    """Weighted batch reward sum_i w_i r_i(A; params_i) for an arm set.

    ``params`` is (n_items, n_arms); ``action`` an iterable of arm ids.
    Items are accumulated in ascending order so the result is
    reproducible bit-for-bit across implementations.
    """
    members = np.asarray(sorted(action), dtype=np.intp)
    w = family.weights
    sub = params[:, members]
    total = 0.0
    if family.kind == "pmc":
        for i in range(w.size):
            total += w[i] * (1.0 - float(np.prod(1.0 - sub[i])))
    elif family.kind == "linear":
        for i in range(w.size):
            total += w[i] * float(np.sum(sub[i]))
    elif family.kind == "logistic":
        for i in range(w.size):
            total += w[i] / (1.0 + family.c * math.exp(-float(np.sum(sub[i]))))
    else:
        raise DomainError(f"unknown reward family {family.kind!r}")
    return float(total)
