"""Kernel selection.

The compiled ``_kernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` module. Set ``BNSL_PURE_PYTHON=1`` to force the
fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels
from .dag import ReachabilityIndex

try:
    if os.environ.get("BNSL_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python kernels requested")
    from . import _kernels
except ImportError:
    _kernels = None

BACKEND = "compiled" if _kernels is not None else "python"


def _wrap(packed):
    bits, forward, backward = packed
    index = ReachabilityIndex.__new__(ReachabilityIndex)
    index.forward = forward
    index.backward = backward
    return bits, index


class _Compiled:
    name = "compiled"

    @staticmethod
    def crossover_bits(p1, p2, n, point, swapped=False):
        first, second = _kernels.crossover_bits(
            np.ascontiguousarray(p1, dtype=np.uint8),
            np.ascontiguousarray(p2, dtype=np.uint8),
            n,
            point,
            swapped,
        )
        return (*_wrap(first), *_wrap(second))

    @staticmethod
    def mutate_bits(bits, n, selected):
        packed, flipped = _kernels.mutate_bits(
            np.ascontiguousarray(bits, dtype=np.uint8),
            n,
            np.ascontiguousarray(selected, dtype=np.uint8),
        )
        return (*_wrap(packed), flipped)

    @staticmethod
    def reach_matrix(adj):
        return _kernels.reach_matrix(adj)


class _Python:
    name = "python"
    crossover_bits = staticmethod(_pykernels.crossover_bits)
    mutate_bits = staticmethod(_pykernels.mutate_bits)
    reach_matrix = staticmethod(_pykernels.reach_matrix)


PYTHON = _Python()
COMPILED = _Compiled() if _kernels is not None else None
kernels = COMPILED if COMPILED is not None else PYTHON


def available() -> list:
    """All importable backends, compiled first."""
    return [k for k in (COMPILED, PYTHON) if k is not None]
