"""Synthetic digraphs for tests and benchmarks."""
import numpy as np

from .graph import DirectedGraph


def synthetic_heavy_tailed(n, m, exponent=2.1, seed=0):
    """Chung-Lu style digraph with independent Pareto in- and out-propensities.

    Roughly ``m`` edges are drawn (duplicates and self-loops are removed afterwards), so the
    result has somewhat fewer.
    """
    rng = np.random.default_rng(seed)
    a = exponent - 1.0
    w_out = rng.pareto(a, n) + 1.0
    w_in = rng.pareto(a, n) + 1.0
    src = rng.choice(n, size=m, p=w_out / w_out.sum())
    dst = rng.choice(n, size=m, p=w_in / w_in.sum())
    return DirectedGraph.from_edges(n, src, dst)


def random_digraph(n, p, seed=0):
    """Erdos-Renyi G(n, p) digraph without self-loops."""
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    s, d = np.nonzero(mask)
    return DirectedGraph.from_edges(n, s, d)
