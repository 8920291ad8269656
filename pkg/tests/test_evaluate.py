import json

import numpy as np
import pytest

from enci.dataset import DataError
from enci.evaluate import (
    bench_graph,
    bench_pairs,
    edge_metrics,
    kmeans_labels,
    kmeanspp_groups,
    run_seed,
)
from enci.synth import SynthSpec


def _adj(p, edges):
    A = np.zeros((p, p), dtype=bool)
    for parent, child in edges:
        A[child, parent] = True
    return A


def test_metrics_identity():
    rng = np.random.default_rng(0)
    for _ in range(20):
        truth = np.tril(rng.uniform(size=(6, 6)) < 0.4, -1)
        m = edge_metrics(truth, truth)
        assert (m.precision, m.recall) == (1.0, 1.0)


def test_metrics_empty_estimate():
    m = edge_metrics(_adj(3, []), _adj(3, [(0, 1)]))
    assert (m.precision, m.recall) == (0.0, 0.0)
    m = edge_metrics(_adj(3, []), _adj(3, []))
    assert (m.precision, m.recall) == (1.0, 1.0)


def test_metrics_reversed_edge():
    m = edge_metrics(_adj(3, [(0, 1), (2, 1)]), _adj(3, [(0, 1), (1, 2)]))
    assert (m.true_positive, m.false_positive, m.false_negative) == (1, 1, 1)
    assert m.precision == 0.5 and m.recall == 0.5


def test_metrics_shape_mismatch():
    with pytest.raises(DataError):
        edge_metrics(np.zeros((2, 2)), np.zeros((3, 3)))


def test_kmeans_two_blobs():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        X = np.vstack([rng.normal(0, 1, (200, 2)), rng.normal(20, 1, (200, 2))])
        truth = np.repeat([0, 1], 200)
        labels = kmeans_labels(X, 2, seed)
        agree = max(np.mean(labels == truth), np.mean(labels != truth))
        assert agree >= 0.99


def test_subsample_single_cluster():
    X = np.random.default_rng(0).normal(size=(300, 3))
    data = kmeanspp_groups(X, k=1, group_size=20, n_groups=10, seed=1)
    assert data.n_groups == 10 and data.group_sizes == [20] * 10
    for g in data.groups:
        rows = {tuple(r) for r in g}
        assert len(rows) == 20
        assert rows <= {tuple(r) for r in X}


def test_subsample_defaults_accepted():
    X = np.random.default_rng(0).normal(size=(3000, 4))
    data = kmeanspp_groups(X, seed=0)
    assert data.n_groups == 1500 and set(data.group_sizes) == {50}
    assert data.variables == ("x1", "x2", "x3", "x4")


def test_subsample_no_eligible_cluster():
    X = np.random.default_rng(0).normal(size=(40, 2))
    with pytest.raises(DataError, match="no cluster exceeds group size"):
        kmeanspp_groups(X, k=2, group_size=50, n_groups=5)


def test_subsample_too_few_rows():
    with pytest.raises(DataError):
        kmeanspp_groups(np.zeros((5, 2)), k=3)


def test_subsample_deterministic():
    X = np.random.default_rng(3).normal(size=(500, 2))
    a = kmeanspp_groups(X, k=3, group_size=10, n_groups=8, seed=9)
    b = kmeanspp_groups(X, k=3, group_size=10, n_groups=8, seed=9)
    assert all(np.array_equal(x, y) for x, y in zip(a.groups, b.groups))


def test_run_seed_depends_on_both_parts():
    assert run_seed(0, 1) != run_seed(0, 2)
    assert run_seed(1, 1) != run_seed(0, 1)
    assert run_seed(4, 5) == run_seed(4, 5)


def test_bench_pairs_aggregates_and_determinism():
    spec = SynthSpec(seed=7, n_groups=40)
    rep = bench_pairs(spec, multipliers=(0.5, 1.0), runs=4)
    for key in ("0.5", "1"):
        expect = np.mean([row[f"correct@{key}"] for row in rep.rows])
        assert rep.aggregates[f"accuracy@{key}"] == pytest.approx(expect, abs=1e-12)
    assert rep.aggregates["best_accuracy"] == max(rep.aggregates["accuracy@0.5"], rep.aggregates["accuracy@1"])
    again = bench_pairs(spec, multipliers=(0.5, 1.0), runs=4)
    assert rep.to_json() == again.to_json()
    assert rep.to_table() == again.to_table()
    doc = json.loads(rep.to_json())
    assert doc["schema_version"] == 1 and len(doc["runs"]) == 4


def test_bench_jobs_do_not_change_results():
    spec = SynthSpec(seed=2, n_groups=30)
    assert bench_pairs(spec, runs=3, jobs=1).to_json() == bench_pairs(spec, runs=3, jobs=2).to_json()


def test_bench_graph_aggregates():
    rep = bench_graph(SynthSpec(seed=1, topology="tsg", n_groups=60, p=4), runs=3)
    assert rep.aggregates["mean_precision"] == pytest.approx(np.mean([r["precision"] for r in rep.rows]), abs=1e-12)
    assert rep.aggregates["mean_recall"] == pytest.approx(np.mean([r["recall"] for r in rep.rows]), abs=1e-12)
    assert [r["run"] for r in rep.rows] == [0, 1, 2]


def test_timing_is_opt_in():
    spec = SynthSpec(seed=0, n_groups=20)
    assert "seconds" not in bench_pairs(spec, runs=1).rows[0]
    assert bench_pairs(spec, runs=1, timing=True).rows[0]["seconds"] >= 0
