"""Structure search: hill climbing, tabu search, the genetic algorithm and an
exhaustive oracle for small graphs."""

from .exhaustive import count_dags, enumerate_dags, exhaustive_best
from .ga import GaConfig, Individual, crossover, evolve, mutate, tournament_select
from .local import HcConfig, TabuConfig, hill_climb, neighborhood, tabu_search
from .trace import SearchTrace, TraceRecord, child_seed

__all__ = [
    "GaConfig",
    "HcConfig",
    "Individual",
    "SearchTrace",
    "TabuConfig",
    "TraceRecord",
    "child_seed",
    "count_dags",
    "crossover",
    "enumerate_dags",
    "evolve",
    "exhaustive_best",
    "hill_climb",
    "mutate",
    "neighborhood",
    "tabu_search",
    "tournament_select",
]
