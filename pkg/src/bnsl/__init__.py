"""Score-based Bayesian network structure learning for continuous data."""

from ._backend import BACKEND
from .dag import Dag, Genome, Move, MoveKind, decode, descendants, encode, random_dag, topological_order
from .scoring import Dataset, ScoreCache, ScoreKind, Scorer, network_score, node_score

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Dag",
    "Dataset",
    "Genome",
    "Move",
    "MoveKind",
    "ScoreCache",
    "ScoreKind",
    "Scorer",
    "decode",
    "descendants",
    "encode",
    "network_score",
    "node_score",
    "random_dag",
    "topological_order",
]
