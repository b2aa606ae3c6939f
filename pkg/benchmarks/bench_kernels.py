"""Compiled vs pure-Python kernel timings on BAC product channels.

    python3 benchmarks/bench_kernels.py [--m 4 5 6 7] [--repeat 3]

Both backends get identical inputs; outputs are checked for equality before
timing is reported.
"""
import argparse
import sys
import time
from fractions import Fraction as F

import numpy as np

from metric_forge import ProductChannelSpec, expand_product, make_channel, score_from_channel, synthesize
from metric_forge import _pykernels, kernels
from metric_forge.compare import ComparisonPolicy, rank_matrix
from metric_forge.metric import integer_scaled


def inputs(m):
    ch = expand_product(ProductChannelSpec(make_channel("BAC", F(1, 10), F(1, 5)), m))
    rank_f = rank_matrix(score_from_channel(ch).dense(), ComparisonPolicy.exact())
    d = synthesize(ch)
    rank_d = d.ranks()
    dist = integer_scaled(d.values)
    edges = _pykernels.build_edges(rank_f)
    n_nodes = ch.size * (ch.size - 1) // 2
    indptr = np.zeros(n_nodes + 1, dtype=np.int64)
    np.add.at(indptr, edges[:, 0] + 1, 1)
    indptr = np.cumsum(indptr)
    indices = np.ascontiguousarray(edges[:, 1])
    return {
        "build_edges": (rank_f,),
        "lex_toposort": (n_nodes, indptr, indices),
        "compat_violations": (rank_f, rank_d),
        "triangle_violations": (dist,),
    }


def best_of(fn, args, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, nargs="+", default=[4, 5, 6])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    compiled = kernels.compiled_backend
    if compiled is None:
        print("compiled extension not available; build with `pip install -e . --no-build-isolation`")
        return 1
    print(f"{'kernel':<20} {'m':>2} {'N':>4} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for m in args.m:
        for name, call in inputs(m).items():
            tp, op = best_of(getattr(_pykernels, name), call, args.repeat)
            tc, oc = best_of(getattr(compiled, name), call, args.repeat)
            if not np.array_equal(op, oc):
                print(f"{name}: backends disagree at m={m}")
                return 2
            print(f"{name:<20} {m:>2} {2 ** m:>4} {tp:>10.4f} {tc:>10.4f} {tp / max(tc, 1e-9):>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
