"""Slow reference computations written with explicit loops.

They share no code with the vectorised paths they are used to check.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def _k(a, b, sigma):
    d2 = sum((ai - bi) ** 2 for ai, bi in zip(a, b))
    return math.exp(-d2 / (2.0 * sigma * sigma))


def _rows(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return [(float(v),) for v in x]
    return [tuple(float(v) for v in r) for r in x]


def median_pairwise_distance(samples) -> float:
    pts = _rows(samples)
    d = sorted(math.dist(a, b) for a, b in itertools.combinations(pts, 2))
    mid = len(d) // 2
    return d[mid] if len(d) % 2 else 0.5 * (d[mid - 1] + d[mid])


def trace_stat(samples, sigma, estimator="biased") -> float:
    pts = _rows(samples)
    n = len(pts)
    diag = sum(_k(a, a, sigma) for a in pts)
    total = sum(_k(a, b, sigma) for a in pts for b in pts)
    if estimator == "biased":
        return (diag - total / n) / (n * n)
    if n < 2:
        return 0.0
    return 1.0 - (total - diag) / (n * (n - 1))


def tau_values(groups, sigma, estimator="biased") -> list[float]:
    stats = [trace_stat(g, sigma, estimator) for g in groups]
    mean = sum(stats) / len(stats)
    return [s - mean for s in stats]


def hsic_vstat(x, y, sigma_x, sigma_y) -> float:
    """m times the biased HSIC estimate from its expanded kernel sums."""
    xs, ys = _rows(x), _rows(y)
    m = len(xs)
    K = [[_k(a, b, sigma_x) for b in xs] for a in xs]
    L = [[_k(a, b, sigma_y) for b in ys] for a in ys]
    t1 = sum(K[i][j] * L[i][j] for i in range(m) for j in range(m))
    t2 = sum(K[i][j] * L[q][r] for i in range(m) for j in range(m) for q in range(m) for r in range(m))
    t3 = sum(K[i][j] * L[i][q] for i in range(m) for j in range(m) for q in range(m))
    hsic_b = t1 / m**2 + t2 / m**4 - 2.0 * t3 / m**3
    return m * hsic_b


def permutation_threshold(x, y, sigma_x, sigma_y, alpha=0.05, n_perm=1000, seed=0) -> float:
    """(1 - alpha) quantile of the statistic over random pairings of y with x."""
    from scipy.spatial.distance import cdist

    xr = np.asarray(x, dtype=float).reshape(len(x), -1)
    yr = np.asarray(y, dtype=float).reshape(len(y), -1)
    m = xr.shape[0]
    K = np.exp(-cdist(xr, xr, "sqeuclidean") / (2 * sigma_x**2))
    L = np.exp(-cdist(yr, yr, "sqeuclidean") / (2 * sigma_y**2))
    H = np.eye(m) - 1.0 / m
    Kc = H @ K @ H
    Lc = H @ L @ H
    rng = np.random.default_rng(seed)
    stats = np.empty(n_perm)
    for b in range(n_perm):
        p = rng.permutation(m)
        stats[b] = np.sum(Kc * Lc[np.ix_(p, p)]) / m
    return float(np.quantile(stats, 1.0 - alpha))


def ols(x, y) -> tuple[float, float]:
    """Slope and intercept from the normal equations, summed by hand."""
    n = len(x)
    sx, sy = sum(x), sum(y)
    sxx = sum(a * a for a in x)
    sxy = sum(a * b for a, b in zip(x, y))
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
    return slope, (sy - slope * sx) / n
