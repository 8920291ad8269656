"""Causal direction and causal graph inference from grouped, nonstationary data.

The statistics used here are normalized traces of per-group tensor mean
embeddings; variation of these traces across groups follows a linear
non-Gaussian model whose direction can be identified with HSIC or LiNGAM.
"""

from enci.dataset import GroupedDataset, DataError, NumericalError
from enci.kernels import KernelConfig, median_heuristic, gaussian_gram, center_gram
from enci.trace import TauProfile, normalize_groups, group_trace_stat, tau_profile, tau_matrix
from enci.hsic import HsicResult, hsic_test, hsic_ratio
from enci.pairwise import PairDecision, Residuals, ols_fit, decide_from_tau, infer_pair
from enci.lingam import (
    CoefficientMatrix,
    GraphEstimate,
    fastica,
    ica_lingam,
    enforce_graph_shape,
    infer_graph,
)
from enci.synth import MechanismSpec, SynthSpec, gen_pair, gen_tsg, gen_mipg_fixed6, generate
from enci.evaluate import EdgeMetrics, BenchReport, edge_metrics, kmeanspp_groups, bench_pairs, bench_graph
from enci.io import load_grouped_csv, save_grouped_csv

__version__ = "0.1.0"

__all__ = [
    "GroupedDataset",
    "DataError",
    "NumericalError",
    "KernelConfig",
    "median_heuristic",
    "gaussian_gram",
    "center_gram",
    "TauProfile",
    "normalize_groups",
    "group_trace_stat",
    "tau_profile",
    "tau_matrix",
    "HsicResult",
    "hsic_test",
    "hsic_ratio",
    "PairDecision",
    "Residuals",
    "ols_fit",
    "decide_from_tau",
    "infer_pair",
    "CoefficientMatrix",
    "GraphEstimate",
    "fastica",
    "ica_lingam",
    "enforce_graph_shape",
    "infer_graph",
    "MechanismSpec",
    "SynthSpec",
    "gen_pair",
    "gen_tsg",
    "gen_mipg_fixed6",
    "generate",
    "EdgeMetrics",
    "BenchReport",
    "edge_metrics",
    "kmeanspp_groups",
    "bench_pairs",
    "bench_graph",
    "load_grouped_csv",
    "save_grouped_csv",
]
