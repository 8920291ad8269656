"""Synthetic grouped datasets: cause-effect pairs, random trees and a fixed
multiple-independent-parent graph.

Adjacency matrices follow the coefficient-matrix convention used throughout
the package: ``adj[child, parent]`` is True for an edge parent -> child.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict, replace

import numpy as np

from enci.dataset import GroupedDataset

CAUSE_MEANS = (1.0, 0.0, -1.0)
CAUSE_SD = 0.3
FUNCTION_IDS = tuple(range(1, 8))

# edges of the fixed 6-node graph, 1-based (parent, child)
MIPG6_EDGES = ((1, 4), (2, 5), (3, 5), (4, 6), (5, 6))

_DEFAULT_GROUPS = {"pair": 200, "tsg": 1000, "mipg": 2000}


@dataclass(frozen=True)
class MechanismSpec:
    kind: str
    function_id: int
    c: float = 1.0

    def __post_init__(self):
        if self.kind not in ("additive", "multiplicative"):
            raise ValueError(f"unknown mechanism kind {self.kind!r}")
        if self.function_id not in FUNCTION_IDS:
            raise ValueError(f"unknown function id {self.function_id}; expected 1..7")

    @classmethod
    def random(cls, kind: str, rng: np.random.Generator) -> "MechanismSpec":
        return cls(kind, int(rng.integers(1, 8)), float(rng.uniform(0.8, 1.2)))


@dataclass(frozen=True)
class SynthSpec:
    """Everything needed to regenerate one synthetic experiment."""

    seed: int = 0
    topology: str = "pair"
    mechanism: str | None = None
    n_groups: int | None = None
    group_size_range: tuple[int, int] = (40, 50)
    p: int = 10
    mipg_strategy: str = "product"

    def __post_init__(self):
        if self.topology not in _DEFAULT_GROUPS:
            raise ValueError(f"unknown topology {self.topology!r}")
        lo, hi = self.group_size_range
        if not 1 <= lo <= hi:
            raise ValueError(f"invalid group size range {self.group_size_range}")
        if self.mipg_strategy not in ("product", "sum"):
            raise ValueError(f"unknown MIPG strategy {self.mipg_strategy!r}")
        if self.mechanism is None:
            # graph experiments are multiplicative; pairs default to additive
            object.__setattr__(self, "mechanism", "additive" if self.topology == "pair" else "multiplicative")
        if self.mechanism not in ("additive", "multiplicative"):
            raise ValueError(f"unknown mechanism {self.mechanism!r}")
        if self.n_groups is None:
            object.__setattr__(self, "n_groups", _DEFAULT_GROUPS[self.topology])
        object.__setattr__(self, "group_size_range", (int(lo), int(hi)))

    def with_seed(self, seed: int) -> "SynthSpec":
        return replace(self, seed=int(seed))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["group_size_range"] = list(self.group_size_range)
        return d


def sample_simplex3(rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the 2-simplex via gaps between sorted uniforms."""
    u = np.sort(rng.random(2))
    return np.array([u[0], u[1] - u[0], 1.0 - u[1]])


def sample_cause(n: int, weights, rng: np.random.Generator) -> np.ndarray:
    """Draw from the three-component Gaussian mixture with means 1, 0, -1."""
    comp = rng.choice(3, size=n, p=np.asarray(weights, dtype=float))
    return np.asarray(CAUSE_MEANS)[comp] + CAUSE_SD * rng.standard_normal(n)


def mechanism_function(x, spec: MechanismSpec, e):
    """The deterministic part f(x); ``e`` only enters f3 (see ``apply_mechanism``)."""
    x = np.asarray(x, dtype=float)
    c = spec.c
    fid = spec.function_id
    if fid == 1:
        return 1.0 / (x * x + 1.0)
    if fid == 2:
        cx = c * x
        return np.sign(cx) * cx * cx
    if fid == 3:
        return np.cos(c * x * e)
    if fid == 4:
        return x * x
    if fid == 5:
        return np.sin(c * x)
    if fid == 6:
        return 2.0 * np.sin(x) + 2.0 * np.cos(x)
    return 4.0 * np.sqrt(np.abs(x))


def draw_noise(n: int, dist: str, rng: np.random.Generator) -> np.ndarray:
    if dist == "normal":
        return rng.standard_normal(n)
    if dist == "uniform":
        return rng.random(n)
    raise ValueError(f"unknown noise distribution {dist!r}")


def apply_mechanism(x, spec: MechanismSpec, rng: np.random.Generator | None = None,
                    noise: str = "normal", e=None) -> np.ndarray:
    """Effect values ``f(x) + E`` or ``f(x) * E``.

    ``e`` overrides the noise draw. The n in f3 = cos(c x n) is taken to be
    the same per-sample noise value E.
    """
    x = np.asarray(x, dtype=float)
    if e is None:
        e = draw_noise(x.size, noise, rng)
    e = np.broadcast_to(np.asarray(e, dtype=float), x.shape)
    fx = mechanism_function(x, spec, e)
    return fx + e if spec.kind == "additive" else fx * e


def _group_size(spec: SynthSpec, rng) -> int:
    lo, hi = spec.group_size_range
    return int(rng.integers(lo, hi + 1))


def gen_pair(spec: SynthSpec) -> tuple[GroupedDataset, np.ndarray]:
    """Cause-effect pair dataset; the truth is always X -> Y."""
    rng = np.random.default_rng(spec.seed)
    groups = []
    weights = []
    for _ in range(spec.n_groups):
        n = _group_size(spec, rng)
        w = sample_simplex3(rng)
        x = sample_cause(n, w, rng)
        y = apply_mechanism(x, MechanismSpec.random(spec.mechanism, rng), rng, "normal")
        groups.append(np.column_stack([x, y]))
        weights.append(w)
    truth = np.array([[False, False], [True, False]])
    data = GroupedDataset(
        ("X", "Y"), tuple(groups), {"synth": spec.to_dict(), "mixture_weights": np.array(weights)}
    )
    return data, truth


def random_tree(p: int, rng: np.random.Generator) -> np.ndarray:
    """Parent index of each node (root has -1); parents precede children."""
    parents = np.full(p, -1)
    for k in range(1, p):
        parents[k] = rng.integers(0, k)
    return parents


def gen_tsg(spec: SynthSpec, p: int | None = None) -> tuple[GroupedDataset, np.ndarray]:
    """Random tree-structured graph with multiplicative U(0,1) noise on every edge.

    Mechanisms are redrawn per edge and per group; the tree is fixed.
    """
    p = spec.p if p is None else p
    if p < 2:
        raise ValueError("a tree needs at least 2 nodes")
    rng = np.random.default_rng(spec.seed)
    parents = random_tree(p, rng)
    groups = []
    for _ in range(spec.n_groups):
        n = _group_size(spec, rng)
        g = np.empty((n, p))
        g[:, 0] = sample_cause(n, sample_simplex3(rng), rng)
        for k in range(1, p):
            mech = MechanismSpec.random(spec.mechanism, rng)
            g[:, k] = apply_mechanism(g[:, parents[k]], mech, rng, "uniform")
        groups.append(g)
    adj = np.zeros((p, p), dtype=bool)
    adj[np.arange(1, p), parents[1:]] = True
    names = tuple(f"x{k + 1}" for k in range(p))
    return GroupedDataset(names, tuple(groups), {"synth": spec.to_dict()}), adj


def mipg6_adjacency() -> np.ndarray:
    adj = np.zeros((6, 6), dtype=bool)
    for parent, child in MIPG6_EDGES:
        adj[child - 1, parent - 1] = True
    return adj


def gen_mipg_fixed6(spec: SynthSpec) -> tuple[GroupedDataset, np.ndarray]:
    """The fixed graph x1->x4, x2->x5, x3->x5, x4->x6, x5->x6.

    A node with several parents combines one random mechanism per parent,
    by product (default) or sum according to ``spec.mipg_strategy``, and the
    result is multiplied by U(0,1) noise.
    """
    rng = np.random.default_rng(spec.seed)
    adj = mipg6_adjacency()
    groups = []
    for _ in range(spec.n_groups):
        n = _group_size(spec, rng)
        g = np.empty((n, 6))
        for k in range(6):
            pa = np.flatnonzero(adj[k])
            if pa.size == 0:
                g[:, k] = sample_cause(n, sample_simplex3(rng), rng)
                continue
            e = rng.random(n)
            parts = [
                mechanism_function(g[:, j], MechanismSpec.random(spec.mechanism, rng), e)
                for j in pa
            ]
            combined = np.prod(parts, axis=0) if spec.mipg_strategy == "product" else np.sum(parts, axis=0)
            g[:, k] = combined * e
        groups.append(g)
    names = tuple(f"x{k + 1}" for k in range(6))
    return GroupedDataset(names, tuple(groups), {"synth": spec.to_dict()}), adj


def generate(spec: SynthSpec) -> tuple[GroupedDataset, np.ndarray]:
    """Dispatch on ``spec.topology``."""
    if spec.topology == "pair":
        return gen_pair(spec)
    if spec.topology == "tsg":
        return gen_tsg(spec)
    return gen_mipg_fixed6(spec)


GSS_COLUMNS = ("father_occupation", "son_income", "father_education",
               "son_occupation", "son_education", "siblings")


def gen_gss_standin(seed: int = 0, n: int = 5000) -> tuple[tuple[str, ...], np.ndarray]:
    """A single survey-like table with six columns and no group labels.

    Rows come from a few latent cohorts with different background
    distributions; within a cohort the columns follow the status-attainment
    structure (family background -> education -> occupation -> income).
    Values are rounded like survey codes. Only meant for exercising the
    subsample-then-infer path end to end.
    """
    rng = np.random.default_rng(seed)
    n_cohorts = 6
    cohort = rng.integers(n_cohorts, size=n)
    shift = rng.normal(0.0, 1.0, size=(n_cohorts, 2))
    spread = rng.uniform(0.5, 1.5, size=n_cohorts)
    z = rng.standard_normal(n)
    f_edu = np.clip(np.round(10 + 3 * shift[cohort, 0] + 3 * spread[cohort] * (0.7 * z + 0.7 * rng.standard_normal(n))), 0, 20)
    sibs = np.clip(np.round(np.exp(1.0 - 0.05 * f_edu + 0.4 * rng.standard_normal(n)) + shift[cohort, 1]), 0, 15)
    f_occ = np.clip(np.round(20 + 2.0 * f_edu + 8 * np.tanh(z) + 6 * rng.standard_normal(n)), 10, 90)
    s_edu = np.clip(np.round(6 + 0.4 * f_edu + 0.05 * f_occ - 0.3 * sibs + 2 * rng.gumbel(size=n)), 0, 20)
    s_occ = np.clip(np.round(5 + 2.5 * s_edu + 0.2 * f_occ - 0.5 * sibs + 8 * rng.laplace(size=n)), 10, 90)
    income = np.round(np.exp(8.5 + 0.06 * s_edu + 0.01 * s_occ + 0.5 * rng.standard_normal(n)), -2)
    X = np.column_stack([f_occ, income, f_edu, s_occ, s_edu, sibs])
    return GSS_COLUMNS, X
