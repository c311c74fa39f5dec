"""Hill climbing and tabu search over DAGs with add/delete/reverse moves.

Scores are maximized throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._backend import kernels
from ..dag import Dag, Move, MoveKind, apply_move, random_dag
from ..scoring import DEFAULT_MAX_PARENTS, Dataset, ScoreKind, Scorer
from .trace import SearchTrace, TraceRecord, child_seed, improves


@dataclass
class HcConfig:
    max_iterations: int = 10_000
    restarts: int = 10
    # "empty": restart 0 starts empty, later restarts random; "random": all random.
    init: str = "empty"
    edge_prob: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.init not in ("empty", "random"):
            raise ValueError(f"init must be 'empty' or 'random', got {self.init!r}")


@dataclass
class TabuConfig:
    tenure: int = 10
    no_improve_window: int | None = None  # default 3 * n
    max_iterations: int | None = None  # default 10 * n^2
    restarts: int = 10
    init: str = "empty"
    edge_prob: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.tenure < 1:
            raise ValueError("tenure must be >= 1")
        if self.no_improve_window is not None and self.no_improve_window < 1:
            raise ValueError("no_improve_window must be >= 1")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.init not in ("empty", "random"):
            raise ValueError(f"init must be 'empty' or 'random', got {self.init!r}")


def neighborhood(dag: Dag, max_parents: int | None = None) -> list[Move]:
    """Every acyclicity-safe single-arc move, adds then deletes then reverses,
    each group in (from, to) order."""
    n = dag.n
    adj = dag.adj
    cap = n if max_parents is None else max_parents
    reach = kernels.reach_matrix(adj)
    indeg = adj.sum(axis=0)
    can_add = ~adj & ~reach.T & (indeg < cap)[None, :]
    np.fill_diagonal(can_add, False)
    moves = [Move(MoveKind.ADD, int(i), int(j)) for i, j in zip(*np.nonzero(can_add))]
    edges = dag.edges()
    moves.extend(Move(MoveKind.DELETE, i, j) for i, j in edges)
    for i, j in edges:
        if indeg[i] >= cap:
            continue
        # Reversal is safe unless another i -> ... -> j path exists.
        via = adj[i] & reach[:, j]
        via[j] = False
        if not via.any():
            moves.append(Move(MoveKind.REVERSE, i, j))
    return moves


def _initial(n: int, restart: int, init: str, edge_prob: float | None, seed: int,
             cap: int, labels) -> Dag:
    if init == "empty" and restart == 0:
        return Dag(n, labels)
    p = edge_prob if edge_prob is not None else min(1.0, 2.0 / n) if n > 1 else 0.0
    dag = random_dag(n, p, child_seed(seed, restart), labels)
    for j in range(n):
        extra = dag.parents(j)[cap:]
        for i in extra:
            dag.remove_edge(i, j)
    return dag


def _best_move(scorer: Scorer, dag: Dag, moves: list[Move]):
    best_move, best_delta = None, float("-inf")
    for move in moves:
        d = scorer.delta(dag, move)
        if d > best_delta:
            best_move, best_delta = move, d
    return best_move, best_delta


def hill_climb(
    data: Dataset,
    kind: "ScoreKind | str",
    config: HcConfig | None = None,
    max_parents: int = DEFAULT_MAX_PARENTS,
    scorer: Scorer | None = None,
) -> tuple[Dag, SearchTrace]:
    """Steepest-ascent hill climbing with restarts.

    Each restart repeatedly takes the best neighbouring move and stops as
    soon as that move no longer improves the score. The best final graph
    over all restarts is returned; ties go to the earliest restart.
    """
    config = config or HcConfig()
    scorer = scorer or Scorer(data, kind, max_parents)
    n = data.n_vars
    trace = SearchTrace()
    best_dag = None
    for r in range(config.restarts):
        dag = _initial(n, r, config.init, config.edge_prob, config.seed,
                       scorer.max_parents, data.labels)
        current = scorer.score(dag)
        trace.records.append(TraceRecord(r, 0, None, current, current))
        for it in range(1, config.max_iterations + 1):
            moves = neighborhood(dag, scorer.max_parents)
            trace.evaluations += len(moves)
            move, delta = _best_move(scorer, dag, moves)
            if move is None or not improves(current + delta, current):
                break
            candidate = apply_move(dag, move)
            new = scorer.score(candidate)
            if not new > current:
                break
            dag, current = candidate, new
            trace.records.append(TraceRecord(r, it, move, current, current))
        trace.finals.append(dag)
        if best_dag is None or current > trace.best_score:
            best_dag, trace.best_score = dag, current
    return best_dag, trace


def tabu_search(
    data: Dataset,
    kind: "ScoreKind | str",
    config: TabuConfig | None = None,
    max_parents: int = DEFAULT_MAX_PARENTS,
    scorer: Scorer | None = None,
) -> tuple[Dag, SearchTrace]:
    """Tabu search returning the best graph seen.

    Every iteration moves to the best admissible neighbour even when it is
    worse. Taking a move makes its inverse tabu for ``tenure`` iterations; a
    tabu move is still admissible when it would beat the best score so far.
    A run stops after ``max_iterations`` or once ``no_improve_window``
    iterations pass without a new best.
    """
    config = config or TabuConfig()
    scorer = scorer or Scorer(data, kind, max_parents)
    n = data.n_vars
    window = config.no_improve_window or 3 * n
    max_iter = config.max_iterations or 10 * n * n
    trace = SearchTrace()
    overall = None
    for r in range(config.restarts):
        dag = _initial(n, r, config.init, config.edge_prob, config.seed,
                       scorer.max_parents, data.labels)
        current = scorer.score(dag)
        best, best_dag = current, dag
        trace.records.append(TraceRecord(r, 0, None, current, best))
        tabu_until: dict[tuple[int, int, int], int] = {}
        stale = 0
        for t in range(1, max_iter + 1):
            moves = neighborhood(dag, scorer.max_parents)
            trace.evaluations += len(moves)
            chosen, chosen_delta, aspired = None, float("-inf"), False
            for move in moves:
                d = scorer.delta(dag, move)
                is_tabu = tabu_until.get(move.key(), 0) >= t
                if is_tabu and not improves(current + d, best):
                    continue
                if d > chosen_delta:
                    chosen, chosen_delta, aspired = move, d, is_tabu
            if chosen is None:
                break
            dag = apply_move(dag, chosen)
            current = scorer.score(dag)
            tabu_until[chosen.inverse().key()] = t + config.tenure
            trace.records.append(TraceRecord(r, t, chosen, current, best, aspired))
            if improves(current, best):
                best, best_dag, stale = current, dag, 0
            else:
                stale += 1
                if stale >= window:
                    break
        trace.finals.append(best_dag)
        if overall is None or best > trace.best_score:
            overall, trace.best_score = best_dag, best
    return overall, trace
