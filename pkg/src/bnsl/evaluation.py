"""Descendant-set evaluation against a gold standard.

A predicted network (or an ensemble of them) is turned into a confidence per
node that it lies downstream of an intervention node. Those confidences are
scored by AUROC against gold labels, and methods are compared across
contexts by their mean within-context rank.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .dag import Dag, descendants


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class GoldStandard:
    intervention: str
    labels: Mapping[str, bool]  # True = descendant

    def __post_init__(self):
        if self.intervention in self.labels:
            raise EvaluationError("the intervention node must not be labelled")
        values = list(self.labels.values())
        if not any(values) or all(values):
            raise EvaluationError("gold standard needs at least one positive and one negative")

    @property
    def positives(self) -> list[str]:
        return sorted(k for k, v in self.labels.items() if v)

    @property
    def negatives(self) -> list[str]:
        return sorted(k for k, v in self.labels.items() if not v)

    def node_labels(self) -> list[str]:
        """Intervention first, then the labelled nodes in file order."""
        return [self.intervention, *self.labels]


@dataclass(frozen=True)
class ContextResult:
    context: str
    method: str
    auroc: float


def node_confidence(networks: Sequence[Dag], intervention: int) -> dict[str, float]:
    """Fraction of networks in which each node is a descendant of ``intervention``."""
    if not networks:
        raise EvaluationError("need at least one network")
    labels = networks[0].labels
    if any(net.labels != labels for net in networks):
        raise EvaluationError("networks disagree on node labels")
    counts = np.zeros(len(labels))
    for net in networks:
        for v in descendants(net, intervention):
            counts[v] += 1
    freq = counts / len(networks)
    return {lab: float(freq[i]) for i, lab in enumerate(labels) if i != intervention}


def auroc(confidence: Mapping[str, float], gold: GoldStandard) -> float:
    """Mann-Whitney AUROC with midranks for ties."""
    missing = [k for k in gold.labels if k not in confidence]
    if missing:
        raise EvaluationError(f"no confidence for: {', '.join(missing)}")
    names = list(gold.labels)
    scores = np.array([confidence[k] for k in names], dtype=float)
    is_pos = np.array([gold.labels[k] for k in names], dtype=bool)
    n_pos = int(is_pos.sum())
    n_neg = len(names) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise EvaluationError("gold standard needs at least one positive and one negative")
    ranks = rankdata(scores, method="average")
    u = ranks[is_pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def evaluate_context(
    networks: Sequence[Dag], gold: GoldStandard, context: str = "", method: str = ""
) -> ContextResult:
    labels = networks[0].labels if networks else ()
    if gold.intervention not in labels:
        raise EvaluationError(f"intervention {gold.intervention!r} is not a node of the networks")
    conf = node_confidence(networks, labels.index(gold.intervention))
    return ContextResult(context, method, auroc(conf, gold))


def mean_rank(results: Sequence[ContextResult]) -> dict[str, float]:
    """Average within-context rank per method (1 = highest AUROC, midranks on ties)."""
    contexts: dict[str, dict[str, float]] = {}
    methods: list[str] = []
    for r in results:
        cell = contexts.setdefault(r.context, {})
        if r.method in cell:
            raise EvaluationError(f"duplicate result for ({r.context}, {r.method})")
        cell[r.method] = r.auroc
        if r.method not in methods:
            methods.append(r.method)
    totals = dict.fromkeys(methods, 0.0)
    for ctx, cell in contexts.items():
        absent = [m for m in methods if m not in cell]
        if absent:
            raise EvaluationError(f"context {ctx!r} lacks results for {', '.join(absent)}")
        ranks = rankdata([-cell[m] for m in methods], method="average")
        for m, rk in zip(methods, ranks):
            totals[m] += float(rk)
    return {m: totals[m] / len(contexts) for m in methods}


def load_gold(path) -> GoldStandard:
    path = Path(path)
    lines = [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("intervention:"):
        raise EvaluationError(f"{path}: first line must be 'intervention:<label>'")
    intervention = lines[0].split(":", 1)[1].strip()
    labels: dict[str, bool] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2 or parts[1].strip() not in ("0", "1"):
            raise EvaluationError(f"{path}:{lineno}: expected '<label>,<0|1>', got {line!r}")
        labels[parts[0].strip()] = parts[1].strip() == "1"
    return GoldStandard(intervention, labels)


def save_gold(gold: GoldStandard, path) -> None:
    rows = [f"intervention:{gold.intervention}"]
    rows += [f"{k},{int(v)}" for k, v in gold.labels.items()]
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")


def write_results(results: Sequence[ContextResult], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["context", "method", "auroc"])
        for r in results:
            w.writerow([r.context, r.method, repr(r.auroc)])


def write_mean_ranks(ranks: Mapping[str, float], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "mean_rank"])
        for m, v in ranks.items():
            w.writerow([m, repr(v)])
