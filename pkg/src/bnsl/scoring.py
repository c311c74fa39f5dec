"""Decomposable linear-Gaussian network scores.

Every node is regressed on its parents (plus an intercept) by ordinary least
squares and scored with the Gaussian log-likelihood at the maximum-likelihood
parameters. AIC and BIC subtract a penalty from that; all three are
"higher is better".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .dag import Dag, Move, MoveKind

DEFAULT_MAX_PARENTS = 5
VARIANCE_FLOOR = 1e-12
RIDGE_LAMBDA = 1e-8
_COND_LIMIT = 1e10
_LOG_2PI = math.log(2.0 * math.pi)


class DataError(ValueError):
    """Dataset contents violate the loader/score contract."""


class UnderdeterminedError(ValueError):
    """More parents than the number of observations can support."""


class ScoreKind(str, Enum):
    LOGLIK = "loglik"
    AIC = "aic"
    BIC = "bic"

    @classmethod
    def parse(cls, value: "str | ScoreKind") -> "ScoreKind":
        if isinstance(value, ScoreKind):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown score {value!r}; expected one of loglik, aic, bic"
            ) from None


class Dataset:
    """Immutable N x n matrix of continuous observations with column labels.

    ``relaxed=True`` skips the N >= 3 requirement; it exists for tiny
    hand-checked fixtures only.
    """

    def __init__(self, values, labels: Sequence[str] | None = None, relaxed: bool = False):
        values = np.array(values, dtype=np.float64)
        if values.ndim != 2:
            raise DataError("dataset must be a 2-D array (observations x variables)")
        n_obs, n_vars = values.shape
        if labels is None:
            labels = [f"V{i}" for i in range(n_vars)]
        labels = tuple(str(x) for x in labels)
        if len(labels) != n_vars:
            raise DataError(f"{len(labels)} labels for {n_vars} columns")
        if any(not x for x in labels) or len(set(labels)) != n_vars:
            raise DataError("labels must be unique and non-empty")
        if not relaxed and n_obs < 3:
            raise DataError(f"need at least 3 observations, got {n_obs}")
        if not np.all(np.isfinite(values)):
            raise DataError("dataset contains missing or non-finite values")
        var = values.var(axis=0)
        zero = [labels[i] for i in np.flatnonzero(var == 0.0)]
        if zero:
            raise DataError(f"zero-variance column(s): {', '.join(zero)}")
        values.setflags(write=False)
        self.values = values
        self.labels = labels
        self.column_variance = var

    @property
    def n_obs(self) -> int:
        return self.values.shape[0]

    @property
    def n_vars(self) -> int:
        return self.values.shape[1]

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DataError(f"unknown variable {label!r}") from None

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"Dataset(n_obs={self.n_obs}, n_vars={self.n_vars})"


@dataclass(frozen=True)
class LinearGaussianFit:
    intercept: float
    coefficients: tuple[float, ...]
    residual_variance: float
    ridge: bool = False


def fit_linear_gaussian(data: Dataset, node: int, parents: Sequence[int]) -> LinearGaussianFit:
    """OLS of ``node`` on ``parents`` plus intercept; variance is RSS / N.

    Near-singular designs get a small ridge term on the normal equations
    instead of failing. The variance is floored relative to the column's own
    variance so exact collinearity stays finite.
    """
    parents = list(parents)
    if node in parents:
        raise ValueError(f"node {node} cannot be its own parent")
    n_obs = data.n_obs
    if len(parents) > n_obs - 2:
        raise UnderdeterminedError(
            f"{len(parents)} parents but only {n_obs} observations (max {n_obs - 2})"
        )
    y = data.values[:, node]
    y_mean = y.mean()
    ridge = False
    if not parents:
        intercept = y_mean
        coefs = np.empty(0)
        resid = y - y_mean
    else:
        x = data.values[:, parents]
        x_mean = x.mean(axis=0)
        xc = x - x_mean
        yc = y - y_mean
        gram = xc.T @ xc
        rhs = xc.T @ yc
        if np.linalg.cond(gram) > _COND_LIMIT:
            ridge = True
            scale = max(np.trace(gram) / len(parents), 1.0)
            gram = gram + RIDGE_LAMBDA * scale * np.eye(len(parents))
        coefs = np.linalg.solve(gram, rhs)
        intercept = y_mean - x_mean @ coefs
        resid = yc - xc @ coefs
    variance = float(resid @ resid) / n_obs
    variance = max(variance, VARIANCE_FLOOR * float(data.column_variance[node]))
    return LinearGaussianFit(float(intercept), tuple(coefs.tolist()), variance, ridge)


def n_params(n_parents: int) -> int:
    """Coefficients + intercept + residual variance."""
    return n_parents + 2


def penalize(loglik: float, n_parents: int, n_obs: int, kind: ScoreKind) -> float:
    k = n_params(n_parents)
    if kind is ScoreKind.AIC:
        return loglik - k
    if kind is ScoreKind.BIC:
        return loglik - 0.5 * k * math.log(n_obs)
    return loglik


def node_score(data: Dataset, node: int, parents: Sequence[int], kind: "ScoreKind | str") -> float:
    kind = ScoreKind.parse(kind)
    fit = fit_linear_gaussian(data, node, parents)
    n_obs = data.n_obs
    loglik = -0.5 * n_obs * (_LOG_2PI + math.log(fit.residual_variance) + 1.0)
    return penalize(loglik, len(parents), n_obs, kind)


class ScoreCache:
    """Memo of node scores keyed by ``(node, sorted parent tuple)``.

    One cache belongs to one (dataset, score kind) pair.
    """

    def __init__(self):
        self._store: dict[tuple[int, tuple[int, ...]], float] = {}
        self.hits = 0
        self.misses = 0

    def __len__(self):
        return len(self._store)

    def lookup(self, data: Dataset, node: int, parents: tuple[int, ...], kind: ScoreKind) -> float:
        key = (node, parents)
        value = self._store.get(key)
        if value is None:
            self.misses += 1
            value = node_score(data, node, parents, kind)
            self._store[key] = value
        else:
            self.hits += 1
        return value


class Scorer:
    """Binds a dataset, score kind, parent cap and cache for one search."""

    def __init__(
        self,
        data: Dataset,
        kind: "ScoreKind | str",
        max_parents: int = DEFAULT_MAX_PARENTS,
        cache: ScoreCache | None = None,
    ):
        self.data = data
        self.kind = ScoreKind.parse(kind)
        self.max_parents = min(max_parents, data.n_obs - 2)
        self.cache = cache if cache is not None else ScoreCache()

    @property
    def n_vars(self) -> int:
        return self.data.n_vars

    def local(self, node: int, parents) -> float:
        return self.cache.lookup(self.data, node, tuple(sorted(parents)), self.kind)

    def score(self, dag: Dag) -> float:
        return math.fsum(self.local(j, dag.index.backward[j]) for j in range(dag.n))

    def within_cap(self, dag: Dag) -> bool:
        return all(len(b) <= self.max_parents for b in dag.index.backward)

    def delta(self, dag: Dag, move: Move) -> float:
        """Score change from applying ``move``; only touched children are rescored."""
        i, j = move.frm, move.to
        pa_j = dag.index.backward[j]
        if move.kind is MoveKind.ADD:
            return self.local(j, (*pa_j, i)) - self.local(j, pa_j)
        without = tuple(p for p in pa_j if p != i)
        d = self.local(j, without) - self.local(j, pa_j)
        if move.kind is MoveKind.DELETE:
            return d
        pa_i = dag.index.backward[i]
        return d + self.local(i, (*pa_i, j)) - self.local(i, pa_i)


def _check_dims(data: Dataset, dag: Dag) -> None:
    if dag.n != data.n_vars:
        raise DataError(f"graph has {dag.n} nodes but dataset has {data.n_vars} variables")


def network_score(
    data: Dataset, dag: Dag, kind: "ScoreKind | str", cache: ScoreCache | None = None
) -> float:
    """Sum of node scores over the graph."""
    _check_dims(data, dag)
    kind = ScoreKind.parse(kind)
    cache = cache if cache is not None else ScoreCache()
    return math.fsum(
        cache.lookup(data, j, tuple(sorted(dag.index.backward[j])), kind) for j in range(dag.n)
    )


def delta_score(
    data: Dataset, dag: Dag, move: Move, kind: "ScoreKind | str", cache: ScoreCache | None = None
) -> float:
    _check_dims(data, dag)
    return Scorer(data, kind, max_parents=data.n_vars, cache=cache).delta(dag, move)
