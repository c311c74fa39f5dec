"""Genetic algorithm over n*n-bit genomes with loop-safe operators.

Crossover and mutation never produce a cyclic individual: every 0 -> 1 bit
is gated by a cycle check against the child's forward/backward lists, so no
repair or rejection step is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import _backend
from ..dag import Dag, ReachabilityIndex, random_dag
from ..scoring import DEFAULT_MAX_PARENTS, Dataset, ScoreKind, Scorer
from .trace import SearchTrace, TraceRecord, child_seed


@dataclass
class GaConfig:
    population_size: int = 100
    generations: int = 100
    tournament_size: int = 3
    crossover_rate: float = 0.9
    mutation_prob: float | None = None  # default 1 / n^2
    elitism_count: int = 2
    seed: int = 0
    # "paper": when parents differ, the child whose parent holds 0 keeps 0 and
    # the other child tries the 1. "swapped": the opposite assignment.
    crossover_conflict_policy: str = "paper"
    edge_prob: float | None = None  # initial population density, default 2 / n

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if not 1 <= self.tournament_size <= self.population_size:
            raise ValueError("tournament_size must lie in [1, population_size]")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must lie in [0, 1]")
        if self.mutation_prob is not None and not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must lie in [0, 1]")
        if not 0 <= self.elitism_count < self.population_size:
            raise ValueError("elitism_count must lie in [0, population_size)")
        if self.crossover_conflict_policy not in ("paper", "swapped"):
            raise ValueError("crossover_conflict_policy must be 'paper' or 'swapped'")


class Individual:
    __slots__ = ("n", "bits", "index", "fitness", "fitness_valid")

    def __init__(self, n: int, bits: np.ndarray, index: ReachabilityIndex,
                 fitness: float = float("-inf"), fitness_valid: bool = False):
        self.n = n
        self.bits = bits
        self.index = index
        self.fitness = fitness
        self.fitness_valid = fitness_valid

    @classmethod
    def from_dag(cls, dag: Dag) -> "Individual":
        return cls(dag.n, dag.adj.astype(np.uint8).reshape(-1), dag.index.copy())

    def to_dag(self, labels=None) -> Dag:
        return Dag.from_adjacency(self.bits.reshape(self.n, self.n), labels)

    def clone(self) -> "Individual":
        return Individual(self.n, self.bits.copy(), self.index.copy(),
                          self.fitness, self.fitness_valid)

    def __repr__(self):
        return f"Individual(n={self.n}, loci={np.flatnonzero(self.bits).tolist()}, fitness={self.fitness})"


def tournament_select(population: list[Individual], tournament_size: int,
                      rng: np.random.Generator) -> Individual:
    """Best of ``tournament_size`` uniform draws (with replacement)."""
    drawn = sorted(rng.integers(0, len(population), size=tournament_size).tolist())
    winner = drawn[0]
    for i in drawn[1:]:
        if population[i].fitness > population[winner].fitness:
            winner = i
    return population[winner]


def crossover(p1: Individual, p2: Individual, rng: np.random.Generator,
              policy: str = "paper", point: int | None = None,
              kernels=None) -> tuple[Individual, Individual]:
    n = p1.n
    if p2.n != n:
        raise ValueError("parents have different node counts")
    nn = n * n
    if point is None:
        if nn < 2:
            return p1.clone(), p2.clone()
        point = int(rng.integers(1, nn))
    k = kernels or _backend.kernels
    b1, i1, b2, i2 = k.crossover_bits(p1.bits, p2.bits, n, point, policy == "swapped")
    return Individual(n, b1, i1), Individual(n, b2, i2)


def mutate(ind: Individual, p_m: float, rng: np.random.Generator,
           kernels=None) -> Individual:
    """Visit each locus with probability ``p_m``: 1 bits drop, 0 bits are set
    when that keeps the graph acyclic. Loci are handled in ascending order."""
    if p_m <= 0.0:
        return ind
    nn = ind.n * ind.n
    selected = (rng.random(nn) <= p_m).astype(np.uint8)
    k = kernels or _backend.kernels
    bits, index, flipped = k.mutate_bits(ind.bits, ind.n, selected)
    if flipped == 0:
        return ind
    return Individual(ind.n, bits, index)


class _Fitness:
    def __init__(self, scorer: Scorer):
        self.scorer = scorer
        self.memo: dict[bytes, float] = {}
        self.evaluations = 0

    def __call__(self, ind: Individual) -> float:
        if not ind.fitness_valid:
            self.evaluations += 1
            key = ind.bits.tobytes()
            value = self.memo.get(key)
            if value is None:
                backward = ind.index.backward
                if any(len(b) > self.scorer.max_parents for b in backward):
                    value = float("-inf")
                else:
                    value = math.fsum(self.scorer.local(j, backward[j]) for j in range(ind.n))
                self.memo[key] = value
            ind.fitness = value
            ind.fitness_valid = True
        return ind.fitness


def evolve(
    data: Dataset,
    kind: "ScoreKind | str",
    config: GaConfig | None = None,
    max_parents: int = DEFAULT_MAX_PARENTS,
    scorer: Scorer | None = None,
    kernels=None,
) -> tuple[Dag, SearchTrace]:
    """Generational GA with elitism and tournament selection.

    Individuals over the parent cap get fitness -inf. The best individual
    ever seen is returned; ``trace.finals`` holds the last population.
    """
    config = config or GaConfig()
    scorer = scorer or Scorer(data, kind, max_parents)
    n = data.n_vars
    p_m = config.mutation_prob if config.mutation_prob is not None else 1.0 / (n * n)
    edge_prob = config.edge_prob if config.edge_prob is not None else min(1.0, 2.0 / n)
    rng = np.random.default_rng(child_seed(config.seed, 0))
    fitness = _Fitness(scorer)

    population = [
        Individual.from_dag(random_dag(n, edge_prob, child_seed(config.seed, i + 1)))
        for i in range(config.population_size)
    ]
    for ind in population:
        fitness(ind)

    def best_of(pop):
        best = pop[0]
        for ind in pop[1:]:
            if ind.fitness > best.fitness:
                best = ind
        return best

    best = best_of(population)
    trace = SearchTrace()
    trace.records.append(TraceRecord(0, 0, None, best.fitness, best.fitness))
    policy = config.crossover_conflict_policy
    for gen in range(1, config.generations + 1):
        order = sorted(range(len(population)), key=lambda i: (-population[i].fitness, i))
        nxt = [population[i] for i in order[: config.elitism_count]]
        while len(nxt) < config.population_size:
            a = tournament_select(population, config.tournament_size, rng)
            b = tournament_select(population, config.tournament_size, rng)
            if rng.random() < config.crossover_rate:
                c1, c2 = crossover(a, b, rng, policy, kernels=kernels)
            else:
                c1, c2 = a, b
            nxt.append(mutate(c1, p_m, rng, kernels))
            if len(nxt) < config.population_size:
                nxt.append(mutate(c2, p_m, rng, kernels))
        population = nxt
        for ind in population:
            fitness(ind)
        gen_best = best_of(population)
        if gen_best.fitness > best.fitness:
            best = gen_best
        trace.records.append(TraceRecord(0, gen, None, gen_best.fitness, best.fitness))

    trace.best_score = best.fitness
    trace.evaluations = fitness.evaluations
    trace.finals = [ind.to_dag(data.labels) for ind in population]
    return best.to_dag(data.labels), trace
