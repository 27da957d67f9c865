"""Classic DTW and differentiable soft-DTW over pairwise cost matrices.

The soft variant replaces the hard minimum in the DP recursion with
softmin_gamma(a) = -gamma * log(sum_i exp(-a_i / gamma)), which makes the
alignment value differentiable in every cost entry; the gradient is the
expected alignment matrix obtained by a reverse DP. gamma = 0 recovers
classic DTW exactly.

All functions are pure and safe to call concurrently. Quadratic DP memory
is accepted; sequences are capped at MAX_SEQ_LEN steps.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (
    BatchItemError,
    InvalidPathError,
    NonFiniteError,
    SequenceTooLongError,
    ValidationError,
)
from .sequences import MAX_SEQ_LEN, FeatureSequence, check_alignable

METRICS = ("euclidean", "squared_euclidean")

PathStep = tuple[int, int]


@dataclass
class SoftDtwResult:
    """Soft-DTW value plus the DP table it came from.

    grad_cost stays None until soft_dtw_grad fills it in; for gamma = 0
    use dtw() and hard_path_matrix() instead (subgradient selection).
    """

    value: float
    dp_table: np.ndarray  # (n+1) x (m+1) accumulated soft costs
    gamma: float
    grad_cost: np.ndarray | None = field(default=None, repr=False)


def validate_cost_matrix(cost) -> np.ndarray:
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] < 1 or cost.shape[1] < 1:
        raise ValidationError(f"cost matrix must be non-empty 2-D, got shape {cost.shape}")
    if cost.shape[0] > MAX_SEQ_LEN or cost.shape[1] > MAX_SEQ_LEN:
        raise SequenceTooLongError(
            f"cost matrix {cost.shape} exceeds {MAX_SEQ_LEN}-step cap"
        )
    if not np.all(np.isfinite(cost)):
        raise NonFiniteError("cost matrix contains NaN or Inf")
    if np.any(cost < 0):
        raise ValidationError("cost matrix has negative entries")
    return cost


def pairwise_cost(
    x: FeatureSequence, y: FeatureSequence, metric: str = "euclidean"
) -> np.ndarray:
    """Cost matrix delta(x_i, y_j), shape (len(x), len(y))."""
    if metric not in METRICS:
        raise ValidationError(f"unknown metric {metric!r}, expected one of {METRICS}")
    check_alignable(x, y)
    return _kernels.pairwise_dist(x.values, y.values, metric == "squared_euclidean")


def check_path(path, n: int, m: int) -> None:
    """Assert boundary, monotonicity, and continuity for an n x m alignment."""
    if len(path) == 0:
        raise InvalidPathError("empty path")
    if tuple(path[0]) != (0, 0):
        raise InvalidPathError(f"path must start at (0, 0), got {path[0]}")
    if tuple(path[-1]) != (n - 1, m - 1):
        raise InvalidPathError(f"path must end at ({n - 1}, {m - 1}), got {path[-1]}")
    for (i0, j0), (i1, j1) in zip(path, path[1:]):
        if (i1 - i0, j1 - j0) not in ((1, 0), (0, 1), (1, 1)):
            raise InvalidPathError(f"illegal step {(i0, j0)} -> {(i1, j1)}")


def dtw(cost) -> tuple[float, list[PathStep]]:
    """Minimal-cost monotone alignment: (distance, path).

    Backtrace tie-breaking is deterministic: diagonal, then vertical
    (advance i), then horizontal.
    """
    cost = validate_cost_matrix(cost)
    n, m = cost.shape
    R = _kernels.softdtw_forward(cost, 0.0)
    distance = float(R[n, m])
    path: list[PathStep] = [(n - 1, m - 1)]
    i, j = n, m
    while i > 1 or j > 1:
        diag = R[i - 1, j - 1]
        vert = R[i - 1, j]
        horiz = R[i, j - 1]
        if diag <= vert and diag <= horiz:
            i -= 1
            j -= 1
        elif vert <= horiz:
            i -= 1
        else:
            j -= 1
        path.append((i - 1, j - 1))
    path.reverse()
    return distance, path


def warping_function(path, x_end_times, t_end_times) -> np.ndarray:
    """Map each x index to a single t index along an alignment path.

    When the path pairs one x with several t, the smallest t index wins,
    making the mapping deterministic and monotone non-decreasing.
    """
    n = len(x_end_times)
    m = len(t_end_times)
    check_path(path, n, m)
    w = np.full(n, -1, dtype=np.int64)
    for i, j in path:
        if w[i] < 0:
            w[i] = j
    return w


def soft_min(values, gamma: float) -> float:
    """softmin_gamma over a non-empty list; gamma = 0 is the hard min.

    Infinite entries drop out of the log-sum-exp naturally (their
    exponent underflows to zero after the max shift).
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.size == 0:
        raise ValidationError("soft_min over an empty list")
    if gamma < 0:
        raise ValidationError(f"gamma must be >= 0, got {gamma}")
    lo = float(np.min(vals))
    if gamma == 0.0 or not math.isfinite(lo):
        return lo
    s = float(np.sum(np.exp(-(vals - lo) / gamma)))
    return lo - gamma * math.log(s)


def soft_dtw(cost, gamma: float = 1.0) -> SoftDtwResult:
    """Soft-DTW value and DP table for a cost matrix."""
    cost = validate_cost_matrix(cost)
    if gamma < 0:
        raise ValidationError(f"gamma must be >= 0, got {gamma}")
    R = _kernels.softdtw_forward(cost, float(gamma))
    n, m = cost.shape
    return SoftDtwResult(value=float(R[n, m]), dp_table=R, gamma=float(gamma))


def soft_dtw_grad(result: SoftDtwResult, cost) -> np.ndarray:
    """d(value)/d(cost) via the reverse DP; entries live in [0, 1].

    Requires gamma > 0; at gamma = 0 the subgradient is the hard-path
    indicator (see hard_path_matrix).
    """
    cost = validate_cost_matrix(cost)
    if result.gamma <= 0:
        raise ValidationError("soft_dtw_grad needs gamma > 0; use dtw path subgradient")
    n, m = cost.shape
    if result.dp_table.shape != (n + 1, m + 1):
        raise ValidationError("dp_table does not match this cost matrix")
    E = _kernels.softdtw_backward(cost, result.dp_table, result.gamma)
    # mathematically in [0, 1]; clip float dust so the invariant is exact
    np.clip(E, 0.0, 1.0, out=E)
    result.grad_cost = E
    return E


def hard_path_matrix(cost) -> np.ndarray:
    """0/1 indicator of the optimal hard-DTW path (gamma = 0 subgradient)."""
    cost = validate_cost_matrix(cost)
    _, path = dtw(cost)
    ind = np.zeros(cost.shape)
    for i, j in path:
        ind[i, j] = 1.0
    return ind


def cost_gradient_to_inputs(
    E: np.ndarray, xv: np.ndarray, yv: np.ndarray, metric: str = "euclidean"
) -> tuple[np.ndarray, np.ndarray]:
    """Chain an alignment gradient through the cost metric to the inputs.

    Returns (dX, dY) for cost[i, j] = delta(x_i, y_j). For the euclidean
    metric, coincident rows get a zero subgradient (the distance is not
    differentiable there).
    """
    if metric not in METRICS:
        raise ValidationError(f"unknown metric {metric!r}")
    diff = xv[:, None, :] - yv[None, :, :]  # (n, m, D)
    if metric == "squared_euclidean":
        w = 2.0 * E
    else:
        dist = np.sqrt(np.sum(diff * diff, axis=2))
        safe = np.where(dist > 1e-12, dist, 1.0)
        w = np.where(dist > 1e-12, E / safe, 0.0)
    dx = np.einsum("nm,nmd->nd", w, diff)
    dy = -np.einsum("nm,nmd->md", w, diff)
    return dx, dy


def soft_dtw_pair(
    x: FeatureSequence,
    y: FeatureSequence,
    gamma: float = 1.0,
    metric: str = "euclidean",
) -> SoftDtwResult:
    """soft_dtw over pairwise_cost(x, y, metric)."""
    return soft_dtw(pairwise_cost(x, y, metric), gamma)


def _max_workers() -> int:
    raw = os.environ.get("SHLK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def soft_dtw_batched(
    pairs, gamma: float = 1.0, metric: str = "euclidean"
) -> list[SoftDtwResult]:
    """Evaluate soft_dtw_pair over a list of sequence pairs.

    Results are identical to sequential per-pair evaluation; SHLK_THREADS
    may spread independent pairs over a thread pool. Per-pair failures are
    re-raised as BatchItemError carrying the pair index.
    """
    pairs = list(pairs)

    def one(indexed):
        idx, (x, y) = indexed
        try:
            return soft_dtw_pair(x, y, gamma, metric)
        except Exception as exc:
            raise BatchItemError(idx, exc) from exc

    workers = _max_workers()
    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, enumerate(pairs)))
    return [one(item) for item in enumerate(pairs)]
