from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dag import Dag, Move


def child_seed(seed: int, stream: int) -> int:
    """Derive an independent 64-bit seed for sub-stream ``stream``."""
    return int(np.random.SeedSequence([seed, stream]).generate_state(1, np.uint64)[0])


def improves(new: float, old: float) -> bool:
    # Gains below this are float noise between likelihood-equivalent graphs.
    return new - old > 1e-10 * max(1.0, abs(old))


@dataclass
class TraceRecord:
    restart: int
    iteration: int
    move: Move | None
    score: float
    best: float
    aspiration: bool = False


@dataclass
class SearchTrace:
    """Per-iteration history of one search run.

    ``finals`` holds the last graph of every restart (or the final GA
    population), which the evaluator uses as an ensemble.
    """

    records: list[TraceRecord] = field(default_factory=list)
    best_score: float = float("-inf")
    evaluations: int = 0
    finals: list[Dag] = field(default_factory=list)

    def by_restart(self) -> dict[int, list[TraceRecord]]:
        out: dict[int, list[TraceRecord]] = {}
        for rec in self.records:
            out.setdefault(rec.restart, []).append(rec)
        return out

    def rows(self):
        for rec in self.records:
            yield (
                rec.restart,
                rec.iteration,
                "" if rec.move is None else repr(rec.move),
                repr(rec.score),
                repr(rec.best),
                int(rec.aspiration),
            )
