import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bnsl import _backend
from bnsl.dag import Dag, Genome, ReachabilityIndex, is_acyclic, random_dag
from bnsl.search import GaConfig, Individual, crossover, evolve, exhaustive_best, mutate, tournament_select

from conftest import linear_pair, random_dataset


def ind(n, edges, fitness=None):
    i = Individual.from_dag(Dag.from_edges(n, edges))
    if fitness is not None:
        i.fitness, i.fitness_valid = fitness, True
    return i


def check(individual):
    adj = individual.bits.reshape(individual.n, individual.n)
    assert not np.any(np.diag(adj))
    assert is_acyclic(adj)
    assert individual.index.matches(ReachabilityIndex.from_adjacency(adj.astype(bool)))


class TestCrossover:
    def test_identical_parents(self, kernels):
        p = ind(5, [(0, 1), (1, 2), (3, 4)])
        for point in range(1, 25):
            c1, c2 = crossover(p, p, None, point=point, kernels=kernels)
            assert np.array_equal(c1.bits, p.bits) and np.array_equal(c2.bits, p.bits)

    def test_opposed_two_node_parents(self, kernels):
        p1, p2 = ind(2, [(0, 1)]), ind(2, [(1, 0)])
        c1, c2 = crossover(p1, p2, None, point=2, kernels=kernels)
        assert Genome(2, c1.bits).loci() == [1]
        assert Genome(2, c2.bits).loci() == []
        assert not c1.fitness_valid and not c2.fitness_valid

    def test_paper_policy_swaps_tails(self, kernels):
        # with no conflicts, child2 ends up with p2's head and p1's tail
        p1, p2 = ind(3, [(0, 1), (1, 2)]), ind(3, [(0, 2)])
        c1, c2 = crossover(p1, p2, None, point=3, kernels=kernels)
        assert Genome(3, c1.bits).loci() == [1]
        assert Genome(3, c2.bits).loci() == [2, 5]

    def test_swapped_policy_clones(self, kernels):
        p1, p2 = ind(3, [(0, 1), (1, 2)]), ind(3, [(0, 2)])
        c1, c2 = crossover(p1, p2, None, policy="swapped", point=3, kernels=kernels)
        assert np.array_equal(c1.bits, p1.bits) and np.array_equal(c2.bits, p2.bits)

    def test_children_acyclic(self, kernels):
        rng = np.random.default_rng(0)
        n = 8
        pool = [Individual.from_dag(random_dag(n, 0.4, s)) for s in range(50)]
        for _ in range(10_000):
            a, b = (pool[k] for k in rng.integers(0, len(pool), 2))
            c1, c2 = crossover(a, b, rng, kernels=kernels)
            check(c1)
            check(c2)


class TestMutate:
    def test_zero_rate(self, kernels):
        p = ind(4, [(0, 1), (2, 3)], fitness=1.5)
        out = mutate(p, 0.0, np.random.default_rng(0), kernels)
        assert out is p and out.fitness_valid

    def test_full_rate_two_nodes(self, kernels):
        out = mutate(ind(2, [(0, 1)]), 1.0, np.random.default_rng(0), kernels)
        assert Genome(2, out.bits).loci() == [2]
        assert not out.fitness_valid

    def test_output_acyclic(self, kernels):
        rng = np.random.default_rng(1)
        cur = ind(8, [])
        for _ in range(10_000):
            cur = mutate(cur, float(rng.random()) * 0.2, rng, kernels)
            check(cur)


class _Drawn:
    """Stands in for a generator whose draws are fixed."""

    def __init__(self, idx):
        self.idx = idx

    def integers(self, lo, hi, size):
        return np.array(self.idx[:size])


class TestTournament:
    def test_single(self):
        pop = [ind(2, [], fitness=1.0)]
        assert tournament_select(pop, 1, np.random.default_rng(0)) is pop[0]

    def test_max_rule(self):
        pop = [ind(2, [], fitness=5.0), ind(2, [(0, 1)], fitness=3.0)]
        assert tournament_select(pop, 2, _Drawn([1, 0])) is pop[0]
        assert tournament_select(pop, 2, _Drawn([1, 1])) is pop[1]

    def test_size_one_is_uniform(self):
        pop = [ind(2, [], fitness=float(k)) for k in range(4)]
        rng = np.random.default_rng(2)
        counts = np.bincount([int(tournament_select(pop, 1, rng).fitness) for _ in range(4000)])
        assert counts.min() > 850

    def test_ties_lowest_index(self):
        pop = [ind(2, [], fitness=1.0), ind(2, [(0, 1)], fitness=1.0)]
        assert tournament_select(pop, 2, _Drawn([1, 0])) is pop[0]


class TestEvolve:
    def test_zero_generations(self):
        data, _ = random_dataset(4, 100, seed=0)
        cfg = GaConfig(population_size=10, generations=0, seed=4)
        dag, trace = evolve(data, "bic", cfg)
        assert len(trace.records) == 1
        assert trace.best_score == max(
            __import__("bnsl").Scorer(data, "bic").score(d) for d in trace.finals
        )

    def test_linear_pair(self):
        data = linear_pair()
        dag, trace = evolve(data, "bic", GaConfig(population_size=50, generations=50, seed=1))
        _, best = exhaustive_best(data, "bic")
        assert dag.n_edges() == 1
        assert trace.best_score == pytest.approx(best, abs=1e-9)

    def test_elitism_monotone_and_deterministic(self):
        data, _ = random_dataset(6, 150, seed=5)
        cfg = GaConfig(population_size=30, generations=30, seed=5)
        a, ta = evolve(data, "aic", cfg)
        b, tb = evolve(data, "aic", cfg)
        bests = [r.best for r in ta.records]
        assert all(y >= x for x, y in zip(bests, bests[1:]))
        assert a == b and [r.score for r in ta.records] == [r.score for r in tb.records]

    @pytest.mark.skipif(_backend.COMPILED is None, reason="compiled kernels not built")
    def test_backends_agree_end_to_end(self):
        data, _ = random_dataset(5, 120, seed=9)
        cfg = GaConfig(population_size=20, generations=20, seed=9)
        a, ta = evolve(data, "bic", cfg, kernels=_backend.COMPILED)
        b, tb = evolve(data, "bic", cfg, kernels=_backend.PYTHON)
        assert a == b and ta.best_score == tb.best_score

    def test_config_validation(self):
        with pytest.raises(ValueError):
            GaConfig(population_size=1)
        with pytest.raises(ValueError):
            GaConfig(tournament_size=0)
        with pytest.raises(ValueError):
            GaConfig(elitism_count=100)
        with pytest.raises(ValueError):
            GaConfig(crossover_conflict_policy="other")


@pytest.mark.skipif(_backend.COMPILED is None, reason="compiled kernels not built")
@settings(max_examples=300, deadline=None)
@given(
    st.integers(1, 9),
    st.integers(0, 2**32 - 1),
    st.floats(0, 0.8),
    st.booleans(),
)
def test_compiled_matches_python(n, seed, p, swapped):
    rng = np.random.default_rng(seed)
    a = random_dag(n, p, seed).adj.astype(np.uint8).ravel()
    b = random_dag(n, p, seed + 1).adj.astype(np.uint8).ravel()
    point = int(rng.integers(0, n * n + 1))
    x = _backend.PYTHON.crossover_bits(a, b, n, point, swapped)
    y = _backend.COMPILED.crossover_bits(a, b, n, point, swapped)
    assert np.array_equal(x[0], y[0]) and np.array_equal(x[2], y[2])
    assert x[1].matches(y[1]) and x[3].matches(y[3])
    sel = (rng.random(n * n) < p).astype(np.uint8)
    u = _backend.PYTHON.mutate_bits(a, n, sel)
    v = _backend.COMPILED.mutate_bits(a, n, sel)
    assert np.array_equal(u[0], v[0]) and u[2] == v[2] and u[1].matches(v[1])
    assert np.array_equal(_backend.PYTHON.reach_matrix(a.reshape(n, n)),
                          _backend.COMPILED.reach_matrix(a.reshape(n, n)))
