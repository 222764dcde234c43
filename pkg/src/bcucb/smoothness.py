"""Smoothness constants of the reward families: closed forms, grid
certification and the parameter-sensitivity inequality.

For a monotone item function f on (0,1)^k the two constants are

* gamma_inf: uniform bound on each partial derivative;
* gamma_g:   bound on the variance-weighted gradient norm
  sqrt(sum_i x_i (1 - x_i) (df/dx_i)^2), whose weights x(1-x) are the
  Bernoulli variance (the Gini impurity), so the norm discounts
  gradients near the edges of the cube where estimates concentrate.

``estimate_smoothness`` maximizes both quantities over a finite point
set, so its results are lower bounds of the true suprema and must never
exceed the closed-form constants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError
from .rewards import RewardFamily, gradient_matrix, item_value


@dataclass(frozen=True)
class SmoothnessParams:
    gamma_inf: float
    gamma_g: float


def closed_form_smoothness(family: RewardFamily, batch_size: int) -> SmoothnessParams:
    """Known smoothness constants per family.

    pmc -> (1, 1/sqrt(e)); linear -> (1, sqrt(k/4));
    logistic -> (1/4, (1/4) * sqrt(1 + log c)), defined for c >= 1/e.
    The pmc constant is batch-size independent and is an upper bound
    valid for every batch size (the per-size supremum is smaller).
    """
    if batch_size < 1:
        raise DomainError("batch size must be >= 1")
    if family.kind == "pmc":
        return SmoothnessParams(1.0, 1.0 / math.sqrt(math.e))
    if family.kind == "linear":
        return SmoothnessParams(1.0, math.sqrt(batch_size / 4.0))
    if family.kind == "logistic":
        if not family.c > 0:
            raise DomainError("logistic family requires c > 0")
        if 1.0 + math.log(family.c) < 0:
            raise DomainError(
                "closed-form logistic constant requires c >= exp(-1)")
        return SmoothnessParams(0.25, 0.25 * math.sqrt(1.0 + math.log(family.c)))
    raise DomainError(f"unknown reward family {family.kind!r}")


def _grid(resolution: float) -> np.ndarray:
    n = round(1.0 / resolution) - 1
    return np.linspace(resolution, 1.0 - resolution, n)


def _structured_points(batch_size: int, resolution: float) -> np.ndarray:
    """Symmetric points plus all two-level points (m coords at a, rest at b).

    The shipped families are exchangeable, and the maximizers of their
    variance-weighted norms take at most two distinct coordinate values
    (checked against full grids for small batch sizes in the test
    suite), so this point set tracks the full-grid maximum at a
    fraction of the cost.
    """
    g = _grid(resolution)
    blocks = [np.repeat(g[:, None], batch_size, axis=1)]
    for m in range(1, batch_size):
        aa, bb = np.meshgrid(g, g, indexing="ij")
        pts = np.empty((g.size * g.size, batch_size))
        pts[:, :m] = aa.reshape(-1, 1)
        pts[:, m:] = bb.reshape(-1, 1)
        blocks.append(pts)
    return np.concatenate(blocks, axis=0)


def _full_grid_points(batch_size: int, resolution: float, max_points: int) -> np.ndarray:
    g = _grid(resolution)
    if g.size ** batch_size > max_points:
        raise CapacityError(
            f"full grid would hold {g.size ** batch_size} points "
            f"(> {max_points}); use the structured point set")
    mesh = np.meshgrid(*([g] * batch_size), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def estimate_smoothness(
    family: RewardFamily,
    batch_size: int,
    resolution: float = 0.01,
    points: str = "structured",
    max_points: int = 2_000_000,
) -> SmoothnessParams:
    """Certify smoothness constants by maximizing over an open-cube grid.

    Args:
        family: reward family to certify.
        batch_size: dimension k of the cube (0,1)^k.
        resolution: grid step; endpoints 0 and 1 are excluded.
        points: "structured" (symmetric + two-level points) or "full"
            (cartesian grid, capacity-guarded).

    Returns lower bounds on (gamma_inf, gamma_g) that converge to the
    true per-size suprema from below as the resolution shrinks.
    """
    if batch_size < 1:
        raise DomainError("batch size must be >= 1")
    if not 0.0 < resolution <= 0.5:
        raise DomainError("resolution must lie in (0, 0.5]")
    if points == "structured":
        pts = _structured_points(batch_size, resolution)
    elif points == "full":
        pts = _full_grid_points(batch_size, resolution, max_points)
    else:
        raise DomainError(f"unknown point set {points!r}")

    grads = gradient_matrix(family.kind, family.c, pts)
    gamma_inf = float(grads.max())
    gini_sq = (pts * (1.0 - pts) * grads * grads).sum(axis=1)
    gamma_g = float(math.sqrt(gini_sq.max()))
    return SmoothnessParams(gamma_inf, gamma_g)


def sensitivity_gap(family: RewardFamily, x, u, v) -> tuple[float, float]:
    """Both sides of the parameter-sensitivity inequality for one item.

    Perturbs x by eps_i = min(u_i * sqrt(x_i (1 - x_i)) + v_i, 1 - x_i)
    and returns (lhs, rhs) with

        lhs = f(x + eps) - f(x)
        rhs = 3 * sqrt(2) * gamma_g * sqrt(sum u_i^2) + gamma_inf * sum v_i

    so callers can assert lhs <= rhs.
    """
    x = np.asarray(x, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if x.ndim != 1 or u.shape != x.shape or v.shape != x.shape:
        raise DomainError("x, u, v must be 1-d vectors of equal length")
    if np.any(x < 0) or np.any(x > 1):
        raise DomainError("x must lie in [0, 1]")
    if np.any(u < 0) or np.any(v < 0):
        raise DomainError("u and v must be nonnegative")

    eps = np.minimum(u * np.sqrt(x * (1.0 - x)) + v, 1.0 - x)
    lhs = item_value(family.kind, family.c, x + eps) - item_value(
        family.kind, family.c, x)
    gamma = closed_form_smoothness(family, x.size)
    rhs = 3.0 * math.sqrt(2.0) * gamma.gamma_g * math.sqrt(float(np.sum(u * u)))
    rhs += gamma.gamma_inf * float(np.sum(v))
    return float(lhs), float(rhs)
