"""Per-group normalized-trace statistics of tensor mean embeddings.

For group i with Gram matrix K_i (n_i samples of one variable) the statistic
is tr(K_i H) / n_i^2 (or its size-unbiased counterpart); its deviation from the across-group mean is the value
tau^(i) used as an observation of the induced linear model.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from enci.dataset import GroupedDataset
from enci.kernels import KernelConfig, gaussian_gram


@dataclass(frozen=True)
class TauProfile:
    variable: str
    values: np.ndarray
    bandwidth: float = float("nan")

    def __len__(self):
        return len(self.values)


def _zscore(g: np.ndarray) -> np.ndarray:
    mu = g.mean(axis=0)
    sd = g.std(axis=0)
    out = np.zeros_like(g)
    ok = sd > 0
    out[:, ok] = (g[:, ok] - mu[ok]) / sd[ok]
    return out


def normalize_groups(data: GroupedDataset) -> GroupedDataset:
    """Standardize every variable within every group (population sd).

    Constant columns become all zeros.
    """
    data.validate(min_groups=1)
    return GroupedDataset(
        data.variables,
        tuple(_zscore(g) for g in data.groups),
        {**data.provenance, "normalized": True},
    )


ESTIMATORS = ("unbiased", "biased")
DEFAULT_ESTIMATOR = "unbiased"


def group_trace_stat(K, estimator: str = DEFAULT_ESTIMATOR) -> float:
    """Normalized trace of one group's centred tensor mean embedding.

    ``"biased"`` is (1/n^2) tr(K H). It carries a bias of order 1/n, so with
    unequal group sizes the group size itself leaks into every variable's
    statistic alike. ``"unbiased"`` replaces it by 1 - mean_{i != j} K_ij, the
    U-statistic for the same population quantity; for unit-diagonal kernels
    (1/n) tr(K H) = (1 - 1/n) * unbiased.
    """
    K = np.asarray(K, dtype=float)
    n = K.shape[0]
    if estimator == "biased":
        # tr(KH) = tr(K) - 1^T K 1 / n
        return float((np.trace(K) - K.sum() / n) / (n * n))
    if estimator == "unbiased":
        if n < 2:
            return 0.0
        return float(1.0 - (K.sum() - np.trace(K)) / (n * (n - 1)))
    raise ValueError(f"unknown trace estimator {estimator!r}; expected one of {ESTIMATORS}")


def _stat(samples: np.ndarray, sigma: float, estimator: str) -> float:
    return group_trace_stat(gaussian_gram(samples, sigma), estimator)


def tau_profile(
    data: GroupedDataset,
    variable,
    cfg: KernelConfig | None = None,
    jobs: int = 1,
    estimator: str = DEFAULT_ESTIMATOR,
) -> TauProfile:
    """Centered trace statistics of one variable across all groups.

    ``data`` is expected to be normalized already. The bandwidth is resolved
    once from the pooled samples of the variable so that every group is
    measured with the same kernel.
    """
    cfg = cfg or KernelConfig()
    cols = data.column(variable)
    sigma = cfg.resolve(np.concatenate(cols))
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            stats = np.array(list(ex.map(lambda c: _stat(c, sigma, estimator), cols)))
    else:
        stats = np.array([_stat(c, sigma, estimator) for c in cols])
    name = data.variables[data.index(variable)]
    return TauProfile(name, stats - stats.mean(), sigma)


def tau_matrix(data: GroupedDataset, cfg: KernelConfig | None = None, jobs: int = 1,
               estimator: str = DEFAULT_ESTIMATOR) -> np.ndarray:
    """N x p matrix whose columns are the tau profiles of every variable."""
    return np.column_stack(
        [tau_profile(data, j, cfg, jobs, estimator).values for j in range(data.n_vars)]
    )
