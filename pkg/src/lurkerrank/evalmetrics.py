"""Ranking-agreement and relevance metrics: Kendall tau, Fagin intersection, Bpref."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._core import kernels
from .rank import ranking as _ranking


@dataclass(frozen=True)
class RelevanceSets:
    R: frozenset
    N: frozenset

    def __post_init__(self):
        if self.R & self.N:
            raise ValueError("relevant and irrelevant sets overlap")


def _as_list(a):
    if hasattr(a, "scores"):
        return a.ranking()
    return np.asarray(a)


def top_count(percent, n):
    """ceil(percent% of n), guarding against float noise (25% of 8 is exactly 2)."""
    return min(n, max(0, math.ceil(percent * n / 100.0 - 1e-9)))


def kendall_tau(a, b):
    """1 - 4 * discordant / (M (M - 1)) on two total orders over the same M >= 2 items."""
    a = _as_list(a)
    b = _as_list(b)
    m = len(a)
    if m < 2:
        raise ValueError("kendall tau needs at least two items")
    if a.dtype.kind in "iu" and b.dtype.kind in "iu" and len(b) == m:
        # integer ids: map through a position array instead of a dict
        lo = min(a.min(), b.min())
        hi = max(a.max(), b.max())
        pos = np.full(hi - lo + 1, -1, dtype=np.int64)
        pos[b - lo] = np.arange(m)
        seq = pos[a - lo]
        if (seq < 0).any() or len(np.unique(seq)) != m:
            raise ValueError("rankings must be permutations of the same node set")
    else:
        a, b = list(a), list(b)
        if len(b) != m or len(set(a)) != m or set(a) != set(b):
            raise ValueError("rankings must be permutations of the same node set")
        pos = {v: k for k, v in enumerate(b)}
        seq = np.fromiter((pos[v] for v in a), dtype=np.int64, count=m)
    disc = kernels.count_inversions(seq)
    pairs = m * (m - 1)
    return (pairs - 4 * disc) / pairs


def fagin_intersection(a, b, k):
    """(1/k) sum_{q<=k} |a[:q] & b[:q]| / q."""
    a = list(_as_list(a))
    b = list(_as_list(b))
    if k <= 0:
        raise ValueError("k must be positive")
    if k > min(len(a), len(b)):
        raise ValueError(f"k={k} exceeds list length {min(len(a), len(b))}")
    seen_a, seen_b = set(), set()
    common = 0
    total = 0.0
    for q in range(k):
        x, y = a[q], b[q]
        if x == y:
            common += 1
        else:
            if x in seen_b:
                common += 1
            if y in seen_a:
                common += 1
        seen_a.add(x)
        seen_b.add(y)
        total += common / (q + 1)
    return total / k


def bpref(rank_list, sets):
    """(1/|R|) sum_r (1 - min(#N above r, |R|) / |R|); unjudged nodes are skipped."""
    R, N = sets.R, sets.N
    nr = len(R)
    if nr == 0:
        raise ValueError("relevant set is empty")
    order = list(_as_list(rank_list))
    present = set(order)
    if not (R | N) <= present:
        raise ValueError("ranking does not cover R and N")
    n_above = 0
    total = 0.0
    for v in order:
        if v in R:
            total += 1.0 - min(n_above, nr) / nr
        elif v in N:
            n_above += 1
    return total / nr


def build_relevance_sets(method_ranking, l_percent, dd=None, bottom_size=None, bottom_percent=25.0):
    """(R, N) from data-driven scores when given, otherwise from the method's own ranking.

    With ``dd``: N = {dd <= 1}, R = top ceil(l%) of the rest ordered by dd.
    Without: N = bottom ``bottom_size`` (default ceil(25%)) of the method ranking, R = top
    ceil(l%) of the rest in method order.
    """
    order = [int(v) for v in _as_list(method_ranking)]
    n = len(order)
    if dd is not None:
        scores = np.asarray(getattr(dd, "scores", dd), dtype=np.float64)
        N = set(int(i) for i in np.flatnonzero(scores <= 1.0))
        rest = [int(v) for v in _ranking(scores) if int(v) not in N]
    else:
        nb = top_count(bottom_percent, n) if bottom_size is None else int(bottom_size)
        N = set(order[n - nb:]) if nb > 0 else set()
        rest = order[: n - nb]
    if not rest:
        raise ValueError("complement of the irrelevant set is empty")
    R = set(rest[: max(1, top_count(l_percent, len(rest)))])
    return RelevanceSets(frozenset(R), frozenset(N))


def drop_nodes(order, mask):
    """Remove nodes flagged in a boolean mask from a ranking list, keeping order."""
    order = np.asarray(order)
    return order[~np.asarray(mask, dtype=bool)[order]]


def comparison_report(rankings, ks=(100, 1000, 10000), ls=(10, 25, 50), dd=None, sink_mask=None,
                      fagin_drop_sinks=True):
    """Metric rows for every ordered pair of named rankings.

    ``rankings`` maps name -> ranking list (node ids, best first). Bpref for pair (A, B) judges A
    against relevance sets built from ``dd`` if given, else from B's ranking. Fagin lists drop
    sinks when ``sink_mask`` is given and ``fagin_drop_sinks`` is set. k values exceeding the list
    length are reported as None.
    """
    rows = []
    names = list(rankings)
    for a in names:
        for b in names:
            if a == b:
                continue
            la, lb = np.asarray(rankings[a]), np.asarray(rankings[b])
            row = {"a": a, "b": b, "kendall": kendall_tau(la, lb)}
            fa, fb = la, lb
            if sink_mask is not None and fagin_drop_sinks:
                fa, fb = drop_nodes(la, sink_mask), drop_nodes(lb, sink_mask)
            for k in ks:
                row[f"F@{k:g}"] = fagin_intersection(fa, fb, k) if k <= min(len(fa), len(fb)) else None
            for l in ls:
                sets = build_relevance_sets(lb, l, dd=dd)
                row[f"bpref@{l:g}"] = bpref(la, sets)
            rows.append(row)
    return rows
