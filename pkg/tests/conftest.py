import numpy as np
import pytest

from bnsl import _backend
from bnsl.dag import Dag
from bnsl.scoring import Dataset
from bnsl.simulate import GroundTruth, random_truth, simulate_linear_gaussian


@pytest.fixture(params=[k.name for k in _backend.available()])
def kernels(request):
    return _backend.COMPILED if request.param == "compiled" else _backend.PYTHON


def linear_pair(n_obs=100, seed=0, slope=2.0, noise=0.1):
    """Two columns with y = slope * x + small noise."""
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n_obs)
    y = slope * x + noise * rng.normal(size=n_obs)
    return Dataset(np.column_stack([x, y]), ["x", "y"])


def chain_truth(n, coef=0.8, noise=1.0):
    dag = Dag.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    coefs = [[] if v == 0 else [coef] for v in range(n)]
    return GroundTruth(dag, np.zeros(n), coefs, np.full(n, noise))


def random_dataset(n_vars, n_obs, seed, edge_prob=0.5):
    from bnsl.dag import random_dag

    dag = random_dag(n_vars, edge_prob, seed)
    truth = random_truth(dag, seed + 1)
    return simulate_linear_gaussian(truth, n_obs, seed + 2), truth
