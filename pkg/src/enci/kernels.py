"""Gaussian Gram matrices, median-heuristic bandwidths and centering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, cdist

from enci.dataset import DataError

SWEEP_MULTIPLIERS = (1 / 10, 1 / 5, 1 / 4, 1 / 3, 1 / 2, 1, 2, 3, 4, 5, 10)

# above this many pairs, scalar medians use order-statistic bisection instead of pdist
_MAX_EXPLICIT_PAIRS = 4_000_000


@dataclass(frozen=True)
class KernelConfig:
    """How a Gaussian kernel bandwidth is chosen.

    ``bandwidth`` of ``None`` means the median heuristic; the median distance
    is then scaled by ``multiplier``. A fixed bandwidth ignores the multiplier.
    """

    bandwidth: float | None = None
    multiplier: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.multiplier) and self.multiplier > 0):
            raise ValueError(f"multiplier must be positive, got {self.multiplier}")
        if self.bandwidth is not None and not (
            np.isfinite(self.bandwidth) and self.bandwidth > 0
        ):
            raise ValueError(f"fixed bandwidth must be positive, got {self.bandwidth}")

    @classmethod
    def fixed(cls, value: float) -> "KernelConfig":
        return cls(bandwidth=float(value))

    @property
    def rule(self) -> str:
        return "median" if self.bandwidth is None else "fixed"

    def resolve(self, samples) -> float:
        """Bandwidth for ``samples`` under this configuration."""
        if self.bandwidth is not None:
            return float(self.bandwidth)
        return self.multiplier * median_heuristic(samples)


def _as_points(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1, 1)
    elif x.ndim == 1:
        x = x[:, None]
    elif x.ndim != 2:
        raise DataError(f"samples must be a vector or matrix, got ndim={x.ndim}")
    if not np.all(np.isfinite(x)):
        raise DataError("non-finite input")
    return x


def _kth_scalar_distance(xs: np.ndarray, k: int) -> float:
    """k-th smallest (1-based) gap x[j] - x[i], i < j, of sorted ``xs``.

    Bisects over the bit patterns of non-negative doubles, counting pairs with
    a sorted search per step, so memory stays O(n).
    """
    n = xs.size
    offsets = np.arange(1, n + 1)

    def count_le(t):
        return int(np.sum(np.searchsorted(xs, xs + t, side="right") - offsets))

    lo = np.array(0.0).view(np.int64).item()
    hi = np.array(xs[-1] - xs[0]).view(np.int64).item()
    if count_le(0.0) >= k:
        return 0.0
    # invariant: count(lo) < k <= count(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if count_le(np.int64(mid).view(np.float64)) >= k:
            hi = mid
        else:
            lo = mid
    return float(np.int64(hi).view(np.float64))


def median_heuristic(samples) -> float:
    """Median Euclidean distance over all distinct pairs of samples.

    Samples may be scalars or rows of a matrix. With an even number of pairs
    the midpoint of the two central distances is returned.
    """
    x = _as_points(samples)
    n = x.shape[0]
    if n < 2:
        raise DataError("median heuristic needs at least two samples")
    n_pairs = n * (n - 1) // 2
    if x.shape[1] == 1 and n_pairs > _MAX_EXPLICIT_PAIRS:
        xs = np.sort(x[:, 0])
        if n_pairs % 2:
            med = _kth_scalar_distance(xs, n_pairs // 2 + 1)
        else:
            a = _kth_scalar_distance(xs, n_pairs // 2)
            b = _kth_scalar_distance(xs, n_pairs // 2 + 1)
            med = 0.5 * (a + b)
    else:
        med = float(np.median(pdist(x)))
    if not med > 0:
        raise DataError("degenerate sample set (zero median distance)")
    return med


def gaussian_gram(samples, bandwidth: float) -> np.ndarray:
    """Gram matrix with entries exp(-|x_i - x_j|^2 / (2 bandwidth^2))."""
    if not (np.isfinite(bandwidth) and bandwidth > 0):
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    x = _as_points(samples)
    sq = cdist(x, x, "sqeuclidean")
    K = np.exp(-sq / (2.0 * bandwidth * bandwidth))
    np.fill_diagonal(K, 1.0)
    return K


def center_gram(K) -> np.ndarray:
    """Right-centre a Gram matrix: K @ H with H = I - 11^T / n."""
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise DataError(f"Gram matrix must be square, got shape {K.shape}")
    return K - K.mean(axis=1, keepdims=True)
