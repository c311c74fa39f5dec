"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeats 2000] [--sizes 5 10 15 20]

Times each kernel on identical inputs, checks the two backends agree, and
prints microseconds per call plus the speed-up.
"""

import argparse
import sys
import timeit

import numpy as np

from bnsl import _backend
from bnsl.dag import random_dag


def inputs(n, rng):
    p1 = random_dag(n, 2.0 / n, int(rng.integers(1 << 31))).adj.astype(np.uint8).reshape(-1)
    p2 = random_dag(n, 2.0 / n, int(rng.integers(1 << 31))).adj.astype(np.uint8).reshape(-1)
    point = int(rng.integers(1, n * n))
    selected = (rng.random(n * n) < 4.0 / (n * n)).astype(np.uint8)
    return p1, p2, point, selected


def cases(k, n, p1, p2, point, selected):
    adj = p1.reshape(n, n).astype(bool)
    return {
        "crossover": lambda: k.crossover_bits(p1, p2, n, point, False),
        "mutate": lambda: k.mutate_bits(p1, n, selected),
        "reach_matrix": lambda: k.reach_matrix(adj),
    }


def agree(a, b, name):
    if name == "reach_matrix":
        return np.array_equal(a, b)
    if name == "mutate":
        return np.array_equal(a[0], b[0]) and a[1].matches(b[1]) and a[2] == b[2]
    return all(np.array_equal(x, y) if isinstance(x, np.ndarray) else x.matches(y) for x, y in zip(a, b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=2000)
    ap.add_argument("--sizes", type=int, nargs="+", default=[5, 10, 15, 20])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if _backend.COMPILED is None:
        print("compiled extension not built; only the Python backend is available", file=sys.stderr)
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<13}{'n':>4}{'python us':>12}{'compiled us':>13}{'speed-up':>10}")
    for n in args.sizes:
        data = inputs(n, rng)
        py = cases(_backend.PYTHON, n, *data)
        cc = cases(_backend.COMPILED, n, *data) if _backend.COMPILED else {}
        for name, fn in py.items():
            t_py = min(timeit.repeat(fn, number=args.repeats, repeat=3)) / args.repeats * 1e6
            if name in cc:
                if not agree(fn(), cc[name](), name):
                    print(f"backends disagree on {name} at n={n}", file=sys.stderr)
                    return 1
                t_cc = min(timeit.repeat(cc[name], number=args.repeats, repeat=3)) / args.repeats * 1e6
                print(f"{name:<13}{n:>4}{t_py:>12.2f}{t_cc:>13.2f}{t_py / t_cc:>9.1f}x")
            else:
                print(f"{name:<13}{n:>4}{t_py:>12.2f}{'-':>13}{'-':>10}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
