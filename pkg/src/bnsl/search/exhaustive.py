"""Brute-force search over every DAG; only feasible for a handful of nodes."""

from __future__ import annotations

from typing import Iterator

from ..dag import CycleError, Dag
from ..scoring import DEFAULT_MAX_PARENTS, Dataset, ScoreKind, Scorer

MAX_EXHAUSTIVE_NODES = 5


class TooManyNodesError(ValueError):
    pass


def enumerate_dags(n: int, labels=None) -> Iterator[Dag]:
    """Yield every labelled DAG on ``n`` nodes exactly once.

    Each unordered pair is decided in turn as absent, forward or backward,
    pruning as soon as a choice closes a cycle. The yielded object is reused
    between steps; copy it to keep it.
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    dag = Dag(n, labels)

    def walk(k: int):
        if k == len(pairs):
            yield dag
            return
        i, j = pairs[k]
        yield from walk(k + 1)
        for a, b in ((i, j), (j, i)):
            try:
                dag.add_edge(a, b)
            except CycleError:
                continue
            yield from walk(k + 1)
            dag.remove_edge(a, b)

    yield from walk(0)


def count_dags(n: int) -> int:
    return sum(1 for _ in enumerate_dags(n))


def exhaustive_best(
    data: Dataset,
    kind: "ScoreKind | str",
    max_n: int = MAX_EXHAUSTIVE_NODES,
    max_parents: int = DEFAULT_MAX_PARENTS,
    scorer: Scorer | None = None,
) -> tuple[Dag, float]:
    """Highest-scoring DAG; ties go to the lexicographically smallest edge list."""
    n = data.n_vars
    if n > max_n:
        raise TooManyNodesError(f"exhaustive search limited to {max_n} nodes, got {n}")
    scorer = scorer or Scorer(data, kind, max_parents)
    best_score = float("-inf")
    best_edges = None
    best_dag = None
    for dag in enumerate_dags(n, data.labels):
        if not scorer.within_cap(dag):
            continue
        s = scorer.score(dag)
        if s > best_score or (s == best_score and dag.edges() < best_edges):
            best_score, best_edges, best_dag = s, dag.edges(), dag.copy()
    return best_dag, best_score
