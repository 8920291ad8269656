import json

import numpy as np
import pytest

from enci.cli import main
from enci.dataset import DataError, GroupedDataset
from enci.io import load_grouped_csv, read_table, save_grouped_csv, write_table
from enci.synth import SynthSpec, gen_pair


def _write(path, text):
    path.write_text(text)
    return path


def test_fixture_two_groups(tmp_path):
    f = _write(tmp_path / "d.csv", "group,a,b\ng1,1,2\ng1,3,4\ng2,5,6\ng2,7,8.5\n")
    data = load_grouped_csv(f)
    assert data.n_groups == 2 and data.n_vars == 2
    assert data.variables == ("a", "b")
    np.testing.assert_array_equal(data.groups[1], [[5, 6], [7, 8.5]])


def test_bad_cell_names_line(tmp_path):
    lines = ["group,a,b"] + [f"g{i % 2},{i},{i}" for i in range(5)] + ["g1,oops,1", "g0,1,1"]
    f = _write(tmp_path / "d.csv", "\n".join(lines) + "\n")
    with pytest.raises(DataError, match=r"line 7.*non-numeric"):
        load_grouped_csv(f)


def test_missing_group_column(tmp_path):
    f = _write(tmp_path / "d.csv", "a,b\n1,2\n")
    with pytest.raises(DataError, match="missing column 'group'"):
        load_grouped_csv(f)


def test_tiny_group_rejected(tmp_path):
    f = _write(tmp_path / "d.csv", "group,a\nx,1\nx,2\ny,3\n")
    with pytest.raises(DataError, match="group 'y' has 1 row"):
        load_grouped_csv(f)


def test_ragged_row(tmp_path):
    f = _write(tmp_path / "d.csv", "group,a,b\nx,1,2\nx,3\n")
    with pytest.raises(DataError, match="line 3"):
        load_grouped_csv(f)


def test_round_trip_exact(tmp_path):
    data, _ = gen_pair(SynthSpec(seed=0, n_groups=5))
    f = tmp_path / "rt.csv"
    save_grouped_csv(data, f)
    back = load_grouped_csv(f)
    assert back.variables == data.variables
    assert all(a.tobytes() == b.tobytes() for a, b in zip(data.groups, back.groups))
    assert f.read_text().splitlines()[0] == "group,X,Y"
    g = tmp_path / "rt2.csv"
    save_grouped_csv(back, g)
    assert f.read_text() == g.read_text()


def test_round_trip_awkward_floats(tmp_path):
    vals = np.array([[0.1, 1e-300], [-2.5e17, 1 / 3], [5e-324, -0.0]])
    data = GroupedDataset.from_arrays([vals], ["u", "v"])
    save_grouped_csv(data, tmp_path / "f.csv")
    back = load_grouped_csv(tmp_path / "f.csv")
    assert back.groups[0].tobytes() == data.groups[0].tobytes()


def test_save_rejects_empty(tmp_path):
    with pytest.raises(DataError):
        save_grouped_csv(GroupedDataset(("a",), ()), tmp_path / "e.csv")


def test_manifest_layout(tmp_path):
    _write(tmp_path / "g1.csv", "a,b\n1,2\n3,4\n")
    _write(tmp_path / "g2.csv", "a,b\n5,6\n7,8\n9,10\n")
    m = {"format_version": 1, "groups": [{"id": "one", "path": "g1.csv"},
                                         {"id": "two", "path": "g2.csv", "rows": [1, 3]}]}
    mf = _write(tmp_path / "m.json", json.dumps(m))
    data = load_grouped_csv(mf)
    assert data.variables == ("a", "b")
    np.testing.assert_array_equal(data.groups[1], [[7, 8], [9, 10]])
    assert data.provenance["group_ids"] == ["one", "two"]


@pytest.mark.parametrize("groups, message", [
    ([{"id": "a", "path": "g1.csv"}, {"id": "a", "path": "g1.csv"}], "duplicate group ids"),
    ([{"id": "a", "path": "nope.csv"}], "missing file"),
    ([{"id": "a", "path": "g1.csv"}, {"id": "b", "path": "g3.csv"}], "inconsistent header"),
])
def test_manifest_errors(tmp_path, groups, message):
    _write(tmp_path / "g1.csv", "a,b\n1,2\n3,4\n")
    _write(tmp_path / "g3.csv", "a,c\n1,2\n3,4\n")
    mf = _write(tmp_path / "m.json", json.dumps({"format_version": 1, "groups": groups}))
    with pytest.raises(DataError, match=message):
        load_grouped_csv(mf)


def test_manifest_version_checked(tmp_path):
    mf = _write(tmp_path / "m.json", json.dumps({"format_version": 9, "groups": []}))
    with pytest.raises(DataError, match="format_version"):
        load_grouped_csv(mf)


def test_table_round_trip(tmp_path):
    X = np.random.default_rng(0).normal(size=(4, 3))
    write_table(tmp_path / "t.csv", ["p", "q", "r"], X)
    names, Y = read_table(tmp_path / "t.csv")
    assert names == ["p", "q", "r"] and Y.tobytes() == X.tobytes()


# ------------------------------------------------------------------- CLI


@pytest.fixture
def pair_csv(tmp_path):
    f = tmp_path / "pair.csv"
    assert main(["gen", "--seed", "3", "--output", str(f)]) == 0
    return f


def test_gen_writes_truth(pair_csv):
    truth = json.loads(pair_csv.with_name("pair.truth.json").read_text())
    assert truth["edges"] == [["X", "Y"]]
    assert truth["spec"]["seed"] == 3


def test_infer_pair_cli(pair_csv, capsys):
    assert main(["infer-pair", str(pair_csv), "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out[0]["direction"] == "XtoY"
    assert out[0]["r_xy"] < out[0]["r_yx"]


def test_infer_pair_sweep_table(pair_csv, capsys):
    assert main(["infer-pair", str(pair_csv), "--bandwidth-multiplier", "0.5",
                 "--bandwidth-multiplier", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("multiplier") and len(lines) == 3


def test_unknown_flag_is_usage_error(capsys):
    assert main(["infer-pair", "x.csv", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err


def test_bad_multiplier_is_usage_error(pair_csv):
    assert main(["infer-pair", str(pair_csv), "--bandwidth-multiplier", "-1"]) == 1


def test_missing_file_is_data_error(tmp_path):
    assert main(["infer-pair", str(tmp_path / "absent.csv")]) == 2


def test_bad_cell_is_data_error(tmp_path, capsys):
    f = _write(tmp_path / "d.csv", "group,a,b\nx,1,2\nx,zz,3\n")
    assert main(["infer-pair", str(f)]) == 2
    assert "line 3" in capsys.readouterr().err


def test_constant_column_is_data_error(tmp_path):
    rng = np.random.default_rng(0)
    groups = [np.column_stack([np.ones(10), rng.normal(size=10)]) for _ in range(12)]
    f = tmp_path / "c.csv"
    save_grouped_csv(GroupedDataset.from_arrays(groups), f)
    assert main(["infer-pair", str(f)]) == 2


def test_bench_pairs_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["bench-pairs", "--seed", "7", "--runs", "3", "--groups", "40", "--format", "json", "--jobs", "1"]
    assert main(args + ["-o", str(a)]) == 0
    assert main(args + ["-o", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_bench_graph_cli(tmp_path):
    out = tmp_path / "g.txt"
    assert main(["bench-graph", "--topology", "mipg", "--groups", "60", "--runs", "2",
                 "--seed", "1", "--jobs", "1", "-o", str(out)]) == 0
    assert "# mean_precision" in out.read_text()


def test_subsample_then_infer_graph(tmp_path, capsys):
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(c, 1, size=(300, 3)) for c in (0, 8)])
    X[:, 1] += 0.8 * X[:, 0] ** 2
    src = tmp_path / "table.csv"
    write_table(src, ["a", "b", "c"], X)
    grouped = tmp_path / "grouped.csv"
    assert main(["subsample", str(src), "--clusters", "2", "--group-size", "30",
                 "--groups", "40", "-o", str(grouped)]) == 0
    assert main(["infer-graph", str(grouped), "--format", "json", "--jobs", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out[0]["variables"] == ["a", "b", "c"]


def test_size_range_validated(tmp_path):
    assert main(["gen", "--size-min", "9", "--size-max", "3", "-o", str(tmp_path / "x.csv")]) == 1
