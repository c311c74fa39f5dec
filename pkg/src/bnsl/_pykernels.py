"""Pure-Python versions of the hot kernels.

Signatures and results match the compiled ``_kernels`` module exactly; the
package picks one of the two at import time (see ``_backend``).
"""

from __future__ import annotations

import numpy as np

from .dag import ReachabilityIndex, _reaches


def _from_bits(bits: np.ndarray, n: int) -> ReachabilityIndex:
    index = ReachabilityIndex(n)
    for locus in np.flatnonzero(bits).tolist():
        index.link(locus // n, locus % n)
    return index


def crossover_bits(p1, p2, n: int, point: int, swapped: bool = False):
    """Loop-safe single-point crossover.

    Loci below ``point`` come from the same-side parent, as do loci where the
    parents agree; both of those sets are subsets of a parent's arcs and so
    cannot form a cycle. Differing loci are then settled in ascending order:
    the side whose parent holds a 0 gets 0, the other child gets 1 only when
    the arc is acyclicity-safe against what it already holds. ``swapped``
    hands the speculative 1 to the opposite child instead.
    """
    nn = n * n
    p1 = np.asarray(p1, dtype=np.uint8)
    p2 = np.asarray(p2, dtype=np.uint8)
    c1 = np.zeros(nn, dtype=np.uint8)
    c2 = np.zeros(nn, dtype=np.uint8)
    i1 = ReachabilityIndex(n)
    i2 = ReachabilityIndex(n)
    a1 = p1.tolist()
    a2 = p2.tolist()
    differing = []
    for i in range(nn):
        if i < point or a1[i] == a2[i]:
            if a1[i]:
                c1[i] = 1
                i1.link(i // n, i % n)
            if a2[i]:
                c2[i] = 1
                i2.link(i // n, i % n)
        else:
            differing.append(i)
    for i in differing:
        frm, to = divmod(i, n)
        gets_one = (a2[i] == 0) != bool(swapped)
        child, index = (c2, i2) if gets_one else (c1, i1)
        if frm != to and not _reaches(index.backward, frm, to):
            child[i] = 1
            index.link(frm, to)
    return c1, i1, c2, i2


def mutate_bits(bits, n: int, selected):
    """Flip each selected locus in ascending order; 0->1 only if loop-free."""
    out = np.array(bits, dtype=np.uint8).reshape(-1)
    index = _from_bits(out, n)
    flipped = 0
    for i in np.flatnonzero(np.asarray(selected)).tolist():
        frm, to = divmod(i, n)
        if frm == to:
            continue
        if out[i]:
            out[i] = 0
            index.unlink(frm, to)
            flipped += 1
        elif not _reaches(index.backward, frm, to):
            out[i] = 1
            index.link(frm, to)
            flipped += 1
    return out, index, flipped


def reach_matrix(adj) -> np.ndarray:
    """Reflexive reachability by a DFS from every node."""
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    succ = [np.flatnonzero(adj[i]).tolist() for i in range(n)]
    reach = np.zeros((n, n), dtype=bool)
    for s in range(n):
        row = reach[s]
        row[s] = True
        stack = [s]
        while stack:
            v = stack.pop()
            for w in succ[v]:
                if not row[w]:
                    row[w] = True
                    stack.append(w)
    return reach
