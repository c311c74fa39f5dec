"""Synthetic linear-Gaussian data from a known DAG.

``generate_insilico_like`` mimics the size of an in-silico signalling task:
20 phosphoproteins, 2 stimuli x 2 concentrations x 4 inhibitor settings,
10 time points and 3 replicates, i.e. 480 rows. Rows are drawn i.i.d.;
the condition/time/replicate layout is only carried as metadata.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dag import Dag, descendants, random_dag, topological_order
from .evaluation import GoldStandard
from .io import load_network, save_network
from .scoring import DataError, Dataset
from .search.trace import child_seed

STIMULI = ("S1", "S2")
CONCENTRATIONS = ("lo", "hi")
INHIBITORS = ("none", "I1", "I2", "I3")
N_TIMEPOINTS = 10
N_REPLICATES = 3


@dataclass
class GroundTruth:
    dag: Dag
    intercepts: np.ndarray
    coefficients: list[np.ndarray]  # aligned with dag.parents(v)
    noise_std: np.ndarray

    def __post_init__(self):
        n = self.dag.n
        self.intercepts = np.asarray(self.intercepts, dtype=float)
        self.noise_std = np.asarray(self.noise_std, dtype=float)
        self.coefficients = [np.asarray(c, dtype=float) for c in self.coefficients]
        if self.intercepts.shape != (n,) or self.noise_std.shape != (n,):
            raise ValueError("intercepts and noise_std need one entry per node")
        if len(self.coefficients) != n:
            raise ValueError("need one coefficient vector per node")
        for v in range(n):
            if len(self.coefficients[v]) != len(self.dag.parents(v)):
                raise ValueError(f"node {v}: coefficient count does not match parent count")
        if np.any(self.noise_std < 0):
            raise ValueError("noise_std must be non-negative")


def random_truth(dag: Dag, seed, coef_range=(0.5, 1.5), noise_range=(0.5, 1.0)) -> GroundTruth:
    rng = np.random.default_rng(seed)
    n = dag.n
    coefs = []
    for v in range(n):
        k = len(dag.parents(v))
        mag = rng.uniform(*coef_range, size=k)
        sign = np.where(rng.random(k) < 0.5, -1.0, 1.0)
        coefs.append(mag * sign)
    return GroundTruth(
        dag,
        intercepts=rng.uniform(-1.0, 1.0, size=n),
        coefficients=coefs,
        noise_std=rng.uniform(*noise_range, size=n),
    )


def simulate_linear_gaussian(truth: GroundTruth, n_obs: int, seed) -> Dataset:
    if n_obs < 3:
        raise DataError("n_obs must be >= 3")
    rng = np.random.default_rng(seed)
    dag = truth.dag
    x = np.zeros((n_obs, dag.n))
    for v in topological_order(dag):
        pa = list(dag.parents(v))
        col = truth.intercepts[v] + rng.normal(0.0, 1.0, n_obs) * truth.noise_std[v]
        if pa:
            col = col + x[:, pa] @ truth.coefficients[v]
        x[:, v] = col
    return Dataset(x, dag.labels)


def intervention_node(dag: Dag) -> int:
    """Highest out-degree node, lowest index on ties."""
    return int(np.argmax(dag.adj.sum(axis=1)))


def gold_from_truth(dag: Dag, intervention: int) -> GoldStandard:
    desc = descendants(dag, intervention)
    labels = {dag.labels[v]: v in desc for v in range(dag.n) if v != intervention}
    return GoldStandard(dag.labels[intervention], labels)


def insilico_metadata() -> list[tuple[int, str, int, int]]:
    """``(row_index, condition, time, replicate)`` for the 480 generated rows."""
    rows = []
    grid = itertools.product(
        STIMULI, CONCENTRATIONS, INHIBITORS, range(N_TIMEPOINTS), range(1, N_REPLICATES + 1)
    )
    for k, (stim, conc, inh, t, rep) in enumerate(grid):
        rows.append((k, f"{stim}_{conc}_{inh}", t, rep))
    return rows


def generate_insilico_like(seed: int, n_nodes: int = 20, edge_prob: float | None = None):
    """Random truth, 480 i.i.d. rows and the descendant gold standard.

    Returns ``(truth, dataset, gold)``. Arc density defaults to 2 / n_nodes. The graph is redrawn (from the next
    sub-seed) in the unlikely case the gold set would be all-positive or
    all-negative.
    """
    labels = [f"P{i + 1}" for i in range(n_nodes)]
    if edge_prob is None:
        edge_prob = min(1.0, 2.0 / n_nodes)
    n_rows = len(STIMULI) * len(CONCENTRATIONS) * len(INHIBITORS) * N_TIMEPOINTS * N_REPLICATES
    for attempt in range(1000):
        dag = random_dag(n_nodes, edge_prob, child_seed(seed, 3 * attempt), labels)
        hub = intervention_node(dag)
        n_desc = len(descendants(dag, hub))
        if 0 < n_desc < n_nodes - 1:
            break
    else:  # pragma: no cover
        raise RuntimeError("could not draw a non-degenerate gold standard")
    truth = random_truth(dag, child_seed(seed, 3 * attempt + 1))
    data = simulate_linear_gaussian(truth, n_rows, child_seed(seed, 3 * attempt + 2))
    return truth, data, gold_from_truth(dag, hub)


def save_metadata(path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row_index", "condition", "time", "replicate"])
        w.writerows(insilico_metadata())


def save_truth(truth: GroundTruth, network_path, params_path) -> None:
    dag = truth.dag
    save_network(dag, network_path)
    lines = []
    for v in range(dag.n):
        cells = [dag.labels[v], repr(float(truth.intercepts[v])), repr(float(truth.noise_std[v]))]
        cells += [
            f"{dag.labels[p]}:{float(c)!r}" for p, c in zip(dag.parents(v), truth.coefficients[v])
        ]
        lines.append(",".join(cells))
    Path(params_path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_truth(network_path, params_path) -> GroundTruth:
    rows = [
        ln.split(",")
        for ln in Path(params_path).read_text(encoding="utf-8").splitlines()
        if ln.strip()
    ]
    labels = [r[0] for r in rows]
    dag = load_network(network_path, labels)
    pos = {lab: i for i, lab in enumerate(labels)}
    intercepts, noise, coefs = [], [], []
    for v, row in enumerate(rows):
        intercepts.append(float(row[1]))
        noise.append(float(row[2]))
        given = {}
        for cell in row[3:]:
            name, value = cell.rsplit(":", 1)
            given[pos[name]] = float(value)
        if set(given) != set(dag.parents(v)):
            raise DataError(f"{params_path}: parameters for {labels[v]} do not match its parents")
        coefs.append([given[p] for p in dag.parents(v)])
    return GroundTruth(dag, np.array(intercepts), coefs, np.array(noise))
