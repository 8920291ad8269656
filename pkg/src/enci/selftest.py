"""Quick oracle and property checks runnable from the installed package."""

from __future__ import annotations

import numpy as np

from enci import oracles
from enci.hsic import hsic_gram_stat
from enci.kernels import KernelConfig, gaussian_gram, median_heuristic
from enci.lingam import enforce_graph_shape
from enci.synth import SynthSpec, gen_pair
from enci.trace import group_trace_stat, normalize_groups, tau_profile
from enci.dataset import GroupedDataset


def _check_median(rng):
    x = rng.normal(size=(int(rng.integers(2, 12)), 2))
    return abs(median_heuristic(x) - oracles.median_pairwise_distance(x)) < 1e-12


def _check_tau(rng):
    for estimator in ("biased", "unbiased"):
        groups = [rng.normal(size=int(rng.integers(2, 7))) for _ in range(int(rng.integers(2, 5)))]
        data = GroupedDataset.from_arrays(groups)
        sigma = float(rng.uniform(0.3, 2.0))
        fast = tau_profile(data, 0, KernelConfig.fixed(sigma), estimator=estimator).values
        if np.max(np.abs(fast - oracles.tau_values(groups, sigma, estimator))) > 1e-12:
            return False
    return True


def _check_hsic(rng):
    m = int(rng.integers(3, 9))
    x, y = rng.normal(size=m), rng.normal(size=m)
    K, L = gaussian_gram(x, 1.0), gaussian_gram(y, 0.7)
    return abs(hsic_gram_stat(K, L) - oracles.hsic_vstat(x, y, 1.0, 0.7)) < 1e-10


def _check_zero_sum(rng):
    data, _ = gen_pair(SynthSpec(seed=int(rng.integers(1 << 30)), n_groups=30))
    z = normalize_groups(data)
    for j in range(2):
        v = tau_profile(z, j).values
        if abs(v.sum()) > 1e-10 * np.max(np.abs(v)):
            return False
    return True


def _check_shape():
    C = np.array([[0, 0, 0, 0], [4, 0, 0, 0], [0, 3, 0, 0], [1, 2, 0, 0]], dtype=float)
    g = enforce_graph_shape(C)
    return g.shape_verdict == "tree_like" and g.coefficients.entries[3, 1] == 2 and g.coefficients.entries[3, 0] == 0


def _check_trace_n2():
    k = float(np.exp(-0.5))
    return abs(group_trace_stat(np.array([[1, k], [k, 1]]), "biased") - (1 - k) / 4) < 1e-15


CHECKS = {
    "median heuristic vs pair enumeration": _check_median,
    "tau profile vs kernel-sum loops": _check_tau,
    "HSIC trace vs quadruple sum": _check_hsic,
    "tau zero-sum": _check_zero_sum,
}


def run_all(seed: int = 0, repeats: int = 20, out=print) -> bool:
    rng = np.random.default_rng(seed)
    ok_all = True
    for name, fn in CHECKS.items():
        ok = all(fn(rng) for _ in range(repeats))
        ok_all &= ok
        out(f"{'PASS' if ok else 'FAIL'}  {name}")
    for name, fn in (("graph shape enforcement", _check_shape), ("two-point trace closed form", _check_trace_n2)):
        ok = fn()
        ok_all &= ok
        out(f"{'PASS' if ok else 'FAIL'}  {name}")
    return ok_all
