import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bnsl.dag import (
    CycleError,
    Dag,
    DuplicateEdgeError,
    Genome,
    GraphError,
    InvalidGenomeError,
    MissingEdgeError,
    ReachabilityIndex,
    decode,
    descendants,
    encode,
    is_acyclic,
    random_dag,
    topological_order,
    transitive_closure,
    would_create_cycle,
)


def chain3():
    return Dag.from_edges(3, [(0, 1), (1, 2)])


class TestGenome:
    def test_decode_bit_12_of_10_nodes(self):
        dag = decode(Genome.from_loci(10, [12]))
        assert dag.edges() == [(1, 2)]

    def test_decode_empty(self):
        dag = decode(Genome(3, np.zeros(9)))
        assert dag.n == 3 and dag.edges() == []
        assert dag.labels == ("V0", "V1", "V2")

    def test_decode_chain(self):
        assert decode(Genome.from_loci(3, [1, 5])).edges() == [(0, 1), (1, 2)]

    def test_encode(self):
        assert encode(Dag(3)).bits.tolist() == [0] * 9
        assert encode(chain3()).loci() == [1, 5]

    def test_self_loop_bit_rejected(self):
        with pytest.raises(InvalidGenomeError):
            decode(Genome.from_loci(3, [4]))

    def test_cyclic_genome_rejected(self):
        # 0->1 (bit 1) and 1->0 (bit 2)
        with pytest.raises(InvalidGenomeError):
            decode(Genome.from_loci(2, [1, 2]))

    def test_wrong_length(self):
        with pytest.raises(InvalidGenomeError):
            Genome(3, np.zeros(8))

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 8), st.floats(0, 1), st.integers(0, 2**32 - 1))
    def test_round_trip(self, n, p, seed):
        dag = random_dag(n, p, seed)
        g = encode(dag)
        assert np.array_equal(decode(g).adj, dag.adj)
        assert encode(decode(g)) == g


class TestCycleCheck:
    def test_chain(self):
        idx = chain3().index
        assert would_create_cycle(idx, 2, 0)
        assert not would_create_cycle(idx, 0, 2)

    def test_empty(self):
        idx = Dag(4).index
        assert not any(would_create_cycle(idx, i, j) for i in range(4) for j in range(4) if i != j)

    def test_self_loop_is_error(self):
        with pytest.raises(GraphError):
            would_create_cycle(Dag(2).index, 1, 1)

    def test_long_cycle_detected(self):
        # a depth-1 scan would miss this one
        dag = Dag.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        assert would_create_cycle(dag.index, 4, 0)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 10), st.floats(0, 0.7), st.integers(0, 2**32 - 1))
    def test_matches_descendants(self, n, p, seed):
        dag = random_dag(n, p, seed)
        for i in range(n):
            for j in range(n):
                if i != j and not dag.adj[i, j]:
                    assert would_create_cycle(dag.index, i, j) == (i in descendants(dag, j))


class TestMutation:
    def test_add(self):
        dag = Dag(2)
        dag.add_edge(0, 1)
        assert dag.edges() == [(0, 1)]
        assert dag.index.forward[0] == [1] and dag.index.backward[1] == [0]

    def test_add_shortcut(self):
        dag = chain3()
        dag.add_edge(0, 2)
        assert dag.n_edges() == 3

    def test_add_cycle(self):
        with pytest.raises(CycleError):
            chain3().add_edge(2, 0)

    def test_add_duplicate(self):
        with pytest.raises(DuplicateEdgeError):
            chain3().add_edge(0, 1)

    def test_remove(self):
        dag = Dag.from_edges(2, [(0, 1)])
        dag.remove_edge(0, 1)
        assert dag.edges() == []
        dag = chain3()
        dag.remove_edge(1, 2)
        assert dag.edges() == [(0, 1)]

    def test_remove_missing(self):
        with pytest.raises(MissingEdgeError):
            Dag(2).remove_edge(0, 1)

    def test_random_operations_keep_invariants(self):
        rng = np.random.default_rng(11)
        n = 15
        dag = Dag(n)
        failures = 0
        for step in range(100_000):
            i, j = (int(x) for x in rng.choice(n, size=2, replace=False))
            if dag.adj[i, j]:
                dag.remove_edge(i, j)
            elif not would_create_cycle(dag.index, i, j):
                dag.add_edge(i, j)
            if step % 10 == 0:
                try:
                    topological_order(dag)
                except Exception:
                    failures += 1
            if step % 1000 == 0:
                assert dag.index.consistent_with(dag.adj)
        assert failures == 0
        assert dag.index.consistent_with(dag.adj)


class TestQueries:
    def test_descendants(self):
        assert descendants(chain3(), 0) == {1, 2}
        assert descendants(Dag(3), 1) == set()
        diamond = Dag.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
        assert descendants(diamond, 0) == {1, 2, 3}

    def test_topological_order(self):
        assert topological_order(chain3()) == [0, 1, 2]
        assert topological_order(Dag(3)) == [0, 1, 2]
        assert topological_order(Dag.from_edges(3, [(2, 0)])) == [1, 2, 0]

    def test_closure(self):
        reach = transitive_closure(chain3().adj)
        assert reach.tolist() == [[True, True, True], [False, True, True], [False, False, True]]


class TestRandomDag:
    def test_no_edges(self):
        for seed in range(5):
            assert random_dag(7, 0.0, seed).n_edges() == 0

    def test_complete(self):
        dag = random_dag(4, 1.0, 3)
        assert dag.n_edges() == 6
        assert is_acyclic(dag.adj)

    def test_deterministic(self):
        assert random_dag(9, 0.4, 5) == random_dag(9, 0.4, 5)


def test_labels_validated():
    with pytest.raises(GraphError):
        Dag(2, ["a", "a"])
    with pytest.raises(GraphError):
        Dag(2, ["a", ""])


def test_index_from_adjacency_matches_incremental():
    dag = random_dag(12, 0.3, 8)
    assert dag.index.matches(ReachabilityIndex.from_adjacency(dag.adj))
