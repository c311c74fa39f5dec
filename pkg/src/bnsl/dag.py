"""Graph core: DAGs over labelled nodes, the n*n bit genome, and the
forward/backward lists used for incremental cycle checks.

A genome bit ``i`` encodes the arc ``i // n -> i % n``.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np


# Cross-check every cycle query with the forward-direction scan too.
CHECK_BOTH_DIRECTIONS = os.environ.get("BNSL_DEBUG", "") not in ("", "0")


class GraphError(ValueError):
    """Base class for structural errors on DAGs and genomes."""


class CycleError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class MissingEdgeError(GraphError):
    pass


class InvalidGenomeError(GraphError):
    pass


class InvariantViolation(RuntimeError):
    """An internal invariant was broken; should be unreachable."""


def default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"V{i}" for i in range(n))


class ReachabilityIndex:
    """Per-node successor (forward) and predecessor (backward) lists."""

    __slots__ = ("forward", "backward")

    def __init__(self, n: int):
        self.forward: list[list[int]] = [[] for _ in range(n)]
        self.backward: list[list[int]] = [[] for _ in range(n)]

    @property
    def n(self) -> int:
        return len(self.forward)

    @classmethod
    def from_adjacency(cls, adj: np.ndarray) -> "ReachabilityIndex":
        n = adj.shape[0]
        index = cls(n)
        src, dst = np.nonzero(adj)
        for i, j in zip(src.tolist(), dst.tolist()):
            index.forward[i].append(j)
            index.backward[j].append(i)
        return index

    def link(self, frm: int, to: int) -> None:
        self.forward[frm].append(to)
        self.backward[to].append(frm)

    def unlink(self, frm: int, to: int) -> None:
        self.forward[frm].remove(to)
        self.backward[to].remove(frm)

    def copy(self) -> "ReachabilityIndex":
        other = ReachabilityIndex.__new__(ReachabilityIndex)
        other.forward = [list(x) for x in self.forward]
        other.backward = [list(x) for x in self.backward]
        return other

    def matches(self, other: "ReachabilityIndex") -> bool:
        """Set-wise equality of both list families."""
        if self.n != other.n:
            return False
        return all(
            sorted(a) == sorted(b)
            for a, b in zip(self.forward + self.backward, other.forward + other.backward)
        )

    def consistent_with(self, adj: np.ndarray) -> bool:
        return self.matches(ReachabilityIndex.from_adjacency(adj))


def _reaches(lists: list[list[int]], start: int, target: int) -> bool:
    # Transitive scan: is `target` reachable from `start` along `lists`?
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in lists[v]:
            if w == target:
                return True
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def would_create_cycle(index: ReachabilityIndex, frm: int, to: int) -> bool:
    """True iff adding ``frm -> to`` closes a directed cycle.

    That happens exactly when ``to`` is already an ancestor of ``frm``, which
    is found by walking the backward lists from ``frm``.
    """
    if frm == to:
        raise GraphError(f"self-loop {frm}->{to} is never allowed")
    found = _reaches(index.backward, frm, to)
    if CHECK_BOTH_DIRECTIONS:
        assert found == _reaches(index.forward, to, frm), (frm, to)
    return found


class Dag:
    """Directed acyclic graph with an adjacency matrix and a live index.

    ``adj[i, j]`` is true iff the arc ``i -> j`` exists. Mutations go through
    :meth:`add_edge` / :meth:`remove_edge`, which keep the forward/backward
    lists in step and refuse to create cycles.
    """

    __slots__ = ("adj", "labels", "index")

    def __init__(self, n: int, labels: Sequence[str] | None = None):
        if n < 0:
            raise GraphError("node count must be non-negative")
        labels = tuple(labels) if labels is not None else default_labels(n)
        if len(labels) != n:
            raise GraphError(f"expected {n} labels, got {len(labels)}")
        if any(not lab for lab in labels) or len(set(labels)) != n:
            raise GraphError("labels must be unique and non-empty")
        self.adj = np.zeros((n, n), dtype=bool)
        self.labels = labels
        self.index = ReachabilityIndex(n)

    @classmethod
    def from_edges(
        cls, n: int, edges: Iterable[tuple[int, int]], labels: Sequence[str] | None = None
    ) -> "Dag":
        dag = cls(n, labels)
        for i, j in edges:
            dag.add_edge(i, j)
        return dag

    @classmethod
    def from_adjacency(cls, adj: np.ndarray, labels: Sequence[str] | None = None) -> "Dag":
        adj = np.asarray(adj, dtype=bool)
        dag = cls(adj.shape[0], labels)
        if np.any(np.diag(adj)):
            raise GraphError("adjacency has self-loops")
        dag.adj = adj.copy()
        dag.index = ReachabilityIndex.from_adjacency(dag.adj)
        if not is_acyclic(dag.adj):
            raise CycleError("adjacency matrix contains a cycle")
        return dag

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    def copy(self) -> "Dag":
        other = Dag.__new__(Dag)
        other.adj = self.adj.copy()
        other.labels = self.labels
        other.index = self.index.copy()
        return other

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.adj[i, j])

    def parents(self, j: int) -> tuple[int, ...]:
        return tuple(sorted(self.index.backward[j]))

    def children(self, i: int) -> tuple[int, ...]:
        return tuple(sorted(self.index.forward[i]))

    def edges(self) -> list[tuple[int, int]]:
        src, dst = np.nonzero(self.adj)
        return list(zip(src.tolist(), dst.tolist()))

    def n_edges(self) -> int:
        return int(self.adj.sum())

    def add_edge(self, frm: int, to: int) -> None:
        self._check_node(frm)
        self._check_node(to)
        if frm == to:
            raise GraphError(f"self-loop on node {frm}")
        if self.adj[frm, to]:
            raise DuplicateEdgeError(f"edge {frm}->{to} already present")
        if would_create_cycle(self.index, frm, to):
            raise CycleError(f"adding {frm}->{to} would create a cycle")
        self.adj[frm, to] = True
        self.index.link(frm, to)

    def remove_edge(self, frm: int, to: int) -> None:
        self._check_node(frm)
        self._check_node(to)
        if not self.adj[frm, to]:
            raise MissingEdgeError(f"edge {frm}->{to} not present")
        self.adj[frm, to] = False
        self.index.unlink(frm, to)

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise GraphError(f"node {v} out of range for n={self.n}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash((self.labels, self.adj.tobytes()))

    def __repr__(self) -> str:
        return f"Dag(n={self.n}, edges={self.edges()})"


@dataclass(eq=False)
class Genome:
    """Flat bit string of length n*n; bit ``i`` is the arc ``i//n -> i%n``."""

    n: int
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.uint8).reshape(-1)
        if self.bits.size != self.n * self.n:
            raise InvalidGenomeError(
                f"genome length {self.bits.size} does not match n^2={self.n * self.n}"
            )

    @classmethod
    def from_loci(cls, n: int, loci: Iterable[int]) -> "Genome":
        bits = np.zeros(n * n, dtype=np.uint8)
        bits[list(loci)] = 1
        return cls(n, bits)

    def loci(self) -> list[int]:
        return np.flatnonzero(self.bits).tolist()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Genome):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)


def decode(genome: Genome, labels: Sequence[str] | None = None) -> Dag:
    n = genome.n
    adj = genome.bits.reshape(n, n).astype(bool)
    if np.any(np.diag(adj)):
        bad = np.flatnonzero(np.diag(adj)).tolist()
        raise InvalidGenomeError(f"self-loop bits set for nodes {bad}")
    if not is_acyclic(adj):
        raise InvalidGenomeError("genome decodes to a cyclic graph")
    return Dag.from_adjacency(adj, labels)


def encode(dag: Dag) -> Genome:
    return Genome(dag.n, dag.adj.astype(np.uint8).reshape(-1))


def is_acyclic(adj: np.ndarray) -> bool:
    try:
        _kahn(np.asarray(adj, dtype=bool))
    except InvariantViolation:
        return False
    return True


def _kahn(adj: np.ndarray) -> list[int]:
    n = adj.shape[0]
    indeg = adj.sum(axis=0).astype(int).tolist()
    succ = [np.flatnonzero(adj[i]).tolist() for i in range(n)]
    heap = [v for v in range(n) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    if len(order) != n:
        raise InvariantViolation("graph contains a directed cycle")
    return order


def topological_order(dag: Dag) -> list[int]:
    """Kahn's algorithm, always taking the smallest available node index."""
    return _kahn(dag.adj)


def descendants(dag: Dag, node: int) -> set[int]:
    """All nodes reachable from ``node`` by one or more arcs.

    Walks the adjacency matrix directly rather than the index, so it can
    serve as an independent check on :func:`would_create_cycle`.
    """
    seen: set[int] = set()
    frontier = [node]
    adj = dag.adj
    while frontier:
        v = frontier.pop()
        for w in np.flatnonzero(adj[v]).tolist():
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    seen.discard(node)
    return seen


def transitive_closure(adj: np.ndarray) -> np.ndarray:
    """Reflexive reachability matrix ``R[i, j]`` = path from i to j exists."""
    n = adj.shape[0]
    reach = np.eye(n, dtype=bool) | np.asarray(adj, dtype=bool)
    # Repeated squaring; converges in ceil(log2 n) rounds.
    while True:
        nxt = (reach.astype(np.int32) @ reach.astype(np.int32)) > 0
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt


def random_dag(n: int, edge_prob: float, seed, labels: Sequence[str] | None = None) -> Dag:
    """Random DAG: shuffle the nodes, then keep each forward pair with
    probability ``edge_prob``."""
    if n < 1:
        raise GraphError("n must be >= 1")
    if not 0.0 <= edge_prob <= 1.0:
        raise GraphError("edge_prob must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    adj = np.zeros((n, n), dtype=bool)
    draws = rng.random(n * (n - 1) // 2)
    k = 0
    for a in range(n):
        for b in range(a + 1, n):
            if draws[k] < edge_prob:
                adj[perm[a], perm[b]] = True
            k += 1
    return Dag.from_adjacency(adj, labels)


class MoveKind(Enum):
    ADD = 0
    DELETE = 1
    REVERSE = 2


@dataclass(frozen=True)
class Move:
    kind: MoveKind
    frm: int
    to: int

    def __repr__(self) -> str:
        return f"{self.kind.name.title()}({self.frm},{self.to})"

    def inverse(self) -> "Move":
        """The move that undoes this one on the resulting graph."""
        if self.kind is MoveKind.ADD:
            return Move(MoveKind.DELETE, self.frm, self.to)
        if self.kind is MoveKind.DELETE:
            return Move(MoveKind.ADD, self.frm, self.to)
        return Move(MoveKind.REVERSE, self.to, self.frm)

    def key(self) -> tuple[int, int, int]:
        return (self.kind.value, self.frm, self.to)


def apply_move(dag: Dag, move: Move, in_place: bool = False) -> Dag:
    out = dag if in_place else dag.copy()
    if move.kind is MoveKind.ADD:
        out.add_edge(move.frm, move.to)
    elif move.kind is MoveKind.DELETE:
        out.remove_edge(move.frm, move.to)
    else:
        out.remove_edge(move.frm, move.to)
        try:
            out.add_edge(move.to, move.frm)
        except CycleError:
            out.add_edge(move.frm, move.to)
            raise
    return out
