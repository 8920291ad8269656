"""Grouped CSV files and JSON manifests.

Two layouts are read:

* a single CSV whose header contains a ``group`` column; the remaining
  columns are the variables, groups appear in order of first occurrence;
* a JSON manifest listing one CSV per group (optionally a row range of a
  shared file), see ``docs/formats.md``.

Files are always written in the single-CSV layout using ``repr`` of every
float, which round-trips binary64 values exactly.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from enci.dataset import DataError, GroupedDataset

GROUP_COLUMN = "group"
MANIFEST_VERSION = 1


def _parse_float(cell: str, path, line: int, col: str) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise DataError(f"{path}: line {line}: non-numeric cell {cell!r} in column {col!r}") from None
    if not math.isfinite(v):
        raise DataError(f"{path}: line {line}: non-finite value {cell!r} in column {col!r}")
    return v


def _read_rows(path):
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"{path}: cannot open ({exc.strerror})") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        rows = [(reader.line_num, r) for r in reader if r and any(c.strip() for c in r)]
    return header, rows


def read_table(path, columns=None) -> tuple[list[str], np.ndarray]:
    """Numeric CSV with a header; returns (column names, n x p array).

    ``columns`` restricts and orders the columns; a ``group`` column is
    dropped unless asked for.
    """
    header, rows = _read_rows(path)
    if columns is None:
        columns = [h for h in header if h != GROUP_COLUMN]
    missing = [c for c in columns if c not in header]
    if missing:
        raise DataError(f"{path}: missing column(s) {missing}")
    idx = [header.index(c) for c in columns]
    out = np.empty((len(rows), len(columns)))
    for r, (line, row) in enumerate(rows):
        if len(row) != len(header):
            raise DataError(f"{path}: line {line}: expected {len(header)} cells, got {len(row)}")
        for j, (c, k) in enumerate(zip(columns, idx)):
            out[r, j] = _parse_float(row[k], path, line, c)
    return list(columns), out


def _load_single(path) -> GroupedDataset:
    header, rows = _read_rows(path)
    if GROUP_COLUMN not in header:
        raise DataError(f"{path}: missing column {GROUP_COLUMN!r}")
    gi = header.index(GROUP_COLUMN)
    variables = [h for h in header if h != GROUP_COLUMN]
    if not variables:
        raise DataError(f"{path}: no variable columns")
    if len(set(header)) != len(header):
        raise DataError(f"{path}: duplicate column names in header")
    vi = [header.index(v) for v in variables]
    order, buckets = [], {}
    for line, row in rows:
        if len(row) != len(header):
            raise DataError(f"{path}: line {line}: expected {len(header)} cells, got {len(row)}")
        gid = row[gi].strip()
        vals = [_parse_float(row[k], path, line, v) for v, k in zip(variables, vi)]
        if gid not in buckets:
            order.append(gid)
            buckets[gid] = []
        buckets[gid].append(vals)
    return _assemble(variables, order, buckets, path)


def _assemble(variables, order, buckets, source) -> GroupedDataset:
    if not order:
        raise DataError(f"{source}: no groups")
    for gid in order:
        if len(buckets[gid]) < 2:
            raise DataError(f"{source}: group {gid!r} has {len(buckets[gid])} row(s); at least 2 required")
    groups = tuple(np.array(buckets[g], dtype=float).reshape(-1, len(variables)) for g in order)
    return GroupedDataset(tuple(variables), groups, {"source": str(source), "group_ids": list(order)})


def _load_manifest(path) -> GroupedDataset:
    path = Path(path)
    try:
        manifest = json.loads(path.read_text())
    except OSError as exc:
        raise DataError(f"{path}: cannot open ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON manifest ({exc})") from None
    version = manifest.get("format_version")
    if version != MANIFEST_VERSION:
        raise DataError(f"{path}: unsupported manifest format_version {version!r}")
    entries = manifest.get("groups")
    if not isinstance(entries, list) or not entries:
        raise DataError(f"{path}: manifest lists no groups")
    variables = manifest.get("variables")
    explicit = variables is not None
    ids = [str(e.get("id")) for e in entries]
    if len(set(ids)) != len(ids):
        raise DataError(f"{path}: duplicate group ids in manifest")
    buckets = {}
    for gid, entry in zip(ids, entries):
        file = path.parent / entry["path"]
        if not file.exists():
            raise DataError(f"{path}: group {gid!r} references missing file {file}")
        header = [h for h in _read_rows(file)[0] if h != GROUP_COLUMN]
        if variables is None:
            variables = header
        elif explicit:
            missing = [v for v in variables if v not in header]
            if missing:
                raise DataError(f"{file}: missing column(s) {missing}")
        elif header != list(variables):
            raise DataError(f"{file}: inconsistent header {header}, expected {list(variables)}")
        _, table = read_table(file, list(variables))
        if "rows" in entry:
            start, stop = entry["rows"]
            table = table[start:stop]
        buckets[gid] = table.tolist()
    return _assemble(list(variables), ids, buckets, path)


def load_grouped_csv(path) -> GroupedDataset:
    """Load a grouped dataset from a single CSV or a ``.json`` manifest."""
    if Path(path).suffix.lower() == ".json":
        return _load_manifest(path)
    return _load_single(path)


def save_grouped_csv(data: GroupedDataset, path) -> None:
    """Write ``data`` as one CSV with a leading ``group`` column."""
    if data.n_groups == 0:
        raise DataError("refusing to write an empty dataset")
    if GROUP_COLUMN in data.variables:
        raise DataError(f"variable name {GROUP_COLUMN!r} is reserved")
    ids = data.provenance.get("group_ids") or [str(i) for i in range(data.n_groups)]
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise DataError(f"{path}: cannot write ({exc.strerror})") from None
    with fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([GROUP_COLUMN, *data.variables])
        for gid, g in zip(ids, data.groups):
            for row in g:
                w.writerow([gid, *(repr(float(v)) for v in row)])


def write_table(path, columns, X) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in np.asarray(X, dtype=float):
            w.writerow([repr(float(v)) for v in row])
