"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--nodes 100000] [--edges 1000000] [--repeat 3]

The full-ranking row runs each backend in a subprocess (LURKERRANK_BACKEND is read at import).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from lurkerrank import _pykernels as py
from lurkerrank.generators import synthetic_heavy_tailed

try:
    from lurkerrank import _kernels as cy
except ImportError:
    cy = None


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def full_rank(backend, n, m):
    code = (
        "import time;from lurkerrank import lurker_rank;"
        "from lurkerrank.generators import synthetic_heavy_tailed as s;"
        f"g=s({n},{m},seed=0);t=time.perf_counter();rv=lurker_rank(g);"
        "print(time.perf_counter()-t, rv.iterations)"
    )
    env = dict(os.environ, LURKERRANK_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    t, it = out.stdout.split()
    return float(t), int(it)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=100_000)
    ap.add_argument("--edges", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()
    if cy is None:
        sys.exit("compiled kernels not built; run `pip install -e . --no-build-isolation` first")

    g = synthetic_heavy_tailed(args.nodes, args.edges, seed=0)
    print(f"# nodes={g.num_nodes} edges={g.num_edges} threads={args.threads}")
    x = np.random.default_rng(0).random(g.num_nodes)
    w = np.random.default_rng(1).random(g.num_edges)
    s, d = g.edges()
    sample = slice(0, min(len(s), 200_000))
    perm = np.random.default_rng(2).permutation(min(g.num_nodes, 200_000))

    cases = [
        ("gather", lambda k: (lambda f=k.Gather(g.in_ptr, g.in_idx): f(x))),
        ("gather_weighted", lambda k: (lambda f=k.Gather(g.in_ptr, g.in_idx, w): f(x))),
        ("count_inversions", lambda k: (lambda: k.count_inversions(perm))),
        ("scc_labels", lambda k: (lambda: k.scc_labels(g.num_nodes, g.out_ptr, g.out_idx))),
        ("common_neighbors", lambda k: (lambda: k.common_neighbors(
            g.out_ptr, g.out_idx, g.in_ptr, g.in_idx, s[sample], d[sample]))),
    ]
    if args.threads > 1:
        cases.append(("gather_threads", lambda k: (
            lambda f=k.Gather(g.in_ptr, g.in_idx): f(x, nthreads=args.threads) if k is cy else f(x))))

    print("kernel\tcython_s\tpython_s\tspeedup")
    for name, make in cases:
        tc = best(make(cy), args.repeat)
        tp = best(make(py), args.repeat)
        print(f"{name}\t{tc:.4f}\t{tp:.4f}\t{tp / tc:.1f}x")
    tc, itc = full_rank("cython", args.nodes, args.edges)
    tp, itp = full_rank("python", args.nodes, args.edges)
    print(f"lurker_rank_LRin\t{tc:.4f}\t{tp:.4f}\t{tp / tc:.1f}x\t# iterations {itc}/{itp}")


if __name__ == "__main__":
    main()
