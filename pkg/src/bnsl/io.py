"""Reading and writing datasets and networks.

Datasets are CSV: a header of variable names, then one observation per row.
Floats are written with ``repr`` so a save/load round trip is bit-exact.
Networks are written as a sorted ``from,to`` edge list, optionally with an
adjacency-matrix CSV beside it.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .dag import Dag, GraphError
from .scoring import DataError, Dataset


def load_dataset(path) -> Dataset:
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        width = len(header)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise DataError(
                    f"{path}: row {lineno} has {len(row)} cells, header has {width}"
                )
            values = []
            for col, cell in enumerate(row):
                cell = cell.strip()
                if cell == "" or cell.lower() in ("na", "nan"):
                    raise DataError(f"{path}: missing value at row {lineno}, column {header[col]!r}")
                try:
                    x = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: cannot parse {cell!r} at row {lineno}, column {header[col]!r}"
                    ) from None
                if not math.isfinite(x):
                    raise DataError(f"{path}: non-finite value at row {lineno}, column {header[col]!r}")
                values.append(x)
            rows.append(values)
    if len(rows) < 3:
        raise DataError(f"{path}: need at least 3 data rows, found {len(rows)}")
    try:
        return Dataset(np.array(rows, dtype=np.float64), header)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def save_dataset(data: Dataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(data.labels)
        for row in data.values.tolist():
            w.writerow([repr(x) for x in row])


def edge_lines(dag: Dag) -> list[str]:
    return sorted(f"{dag.labels[i]},{dag.labels[j]}" for i, j in dag.edges())


def save_network(dag: Dag, path, adjacency_path=None) -> None:
    lines = edge_lines(dag)
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    if adjacency_path is not None:
        save_adjacency(dag, adjacency_path)


def save_adjacency(dag: Dag, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(dag.labels)
        for row in dag.adj.astype(int).tolist():
            w.writerow(row)


def read_edge_labels(path) -> list[tuple[str, str]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from exc
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2 or not all(parts):
            raise DataError(f"{path}:{lineno}: expected 'from,to', got {line!r}")
        edges.append((parts[0], parts[1]))
    return edges


def load_network(path, labels: Sequence[str]) -> Dag:
    """Read an edge list onto a graph over ``labels``."""
    labels = tuple(labels)
    pos = {lab: i for i, lab in enumerate(labels)}
    dag = Dag(len(labels), labels)
    for a, b in read_edge_labels(path):
        unknown = [x for x in (a, b) if x not in pos]
        if unknown:
            raise DataError(f"{path}: unknown node label(s) {', '.join(unknown)}")
        try:
            dag.add_edge(pos[a], pos[b])
        except GraphError as exc:
            raise DataError(f"{path}: edge {a}->{b}: {exc}") from None
    return dag


def load_adjacency(path) -> Dag:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    labels = rows[0]
    adj = np.array([[int(x) for x in r] for r in rows[1:] if r], dtype=bool)
    if adj.shape != (len(labels), len(labels)):
        raise DataError(f"{path}: adjacency is not square over {len(labels)} labels")
    return Dag.from_adjacency(adj, labels)
