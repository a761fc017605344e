"""Structural analyses on top of rankings: reciprocity, attachment, power-law fits,
delurking randomization, directed topological overlap, percolation and resilience."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from ._core import get_threads, kernels
from .evalmetrics import top_count
from .graph import DirectedGraph, in_out_ratio, induced_subgraph, reciprocity_counts, scc_labels


def _order(ranking):
    if hasattr(ranking, "scores"):
        return ranking.ranking()
    return np.asarray(ranking, dtype=np.int64)


# ---------------------------------------------------------------- reciprocity


def reciprocity_report(g, ranking, fractions=(25, 10, 5), include_potential=True):
    """One row per top-fraction of the ranking (plus the ratio>1 set when ``include_potential``).

    Columns: nodes, induced edges, reciprocal lurking edges, rle (reciprocal lurking edges over
    all edges of g), share of g's reciprocal edges that lie in the induced graph, and share of the
    induced graph's edges that are reciprocal.
    """
    order = _order(ranking)
    n = g.num_nodes
    total_recip, total_edges = reciprocity_counts(g)
    sets = [(f"top{f}%", order[: top_count(f, n)]) for f in fractions]
    if include_potential:
        sets.append(("ratio>1", np.flatnonzero(in_out_ratio(g) > 1.0)))
    rows = []
    for name, nodes in sets:
        rle, sub_edges = reciprocity_counts(g, nodes)
        rows.append({
            "set": name,
            "nodes": int(len(nodes)),
            "edges": sub_edges,
            "reciprocal_lurking_edges": rle,
            "rle": rle / total_edges if total_edges else 0.0,
            "recip_share_of_graph": rle / total_recip if total_recip else 0.0,
            "recip_share_of_subgraph": rle / sub_edges if sub_edges else 0.0,
        })
    return rows


def attachment_distributions(g, ranking, fraction=25):
    """Histograms of lurkers per active user and active users per lurker.

    Lurkers are the top ``fraction``% of the ranking, actives the bottom ``fraction``%. For an
    active a, count lurkers l with edge a -> l; for a lurker l, count actives a with a -> l.
    Returns two dicts {count: number of nodes}.
    """
    if not (0 < fraction <= 50):
        raise ValueError("fraction must be in (0, 50]")
    order = _order(ranking)
    n = g.num_nodes
    k = top_count(fraction, n)
    lurk = np.zeros(n, dtype=bool)
    act = np.zeros(n, dtype=bool)
    lurk[order[:k]] = True
    act[order[n - k:]] = True
    s, d = g.edges()
    m = act[s] & lurk[d]
    per_active = np.bincount(s[m], minlength=n)[act]
    per_lurker = np.bincount(d[m], minlength=n)[lurk]

    def hist(c):
        vals, cnt = np.unique(c, return_counts=True)
        return {int(v): int(x) for v, x in zip(vals, cnt)}

    return hist(per_active), hist(per_lurker)


# ---------------------------------------------------------------- power law


@dataclass
class PowerLawFit:
    alpha: float
    xmin: int
    ks: float
    n_tail: int = 0


def _zeta_mle(tail, xmin):
    logsum = np.log(tail).sum()
    m = len(tail)

    def nll(a):
        return a * logsum + m * math.log(special.zeta(a, xmin))

    res = optimize.minimize_scalar(nll, bounds=(1.0001, 10.0), method="bounded",
                                   options={"xatol": 1e-7})
    return float(res.x)


def _ks(tail, alpha, xmin):
    vals, cnt = np.unique(tail, return_counts=True)
    emp = np.cumsum(cnt) / len(tail)
    z0 = special.zeta(alpha, xmin)
    model = 1.0 - special.zeta(alpha, vals + 1.0) / z0
    # compare at both sides of each step of the empirical CDF
    emp_before = np.concatenate(([0.0], emp[:-1]))
    model_before = np.concatenate(([0.0], model[:-1]))
    return float(max(np.abs(emp - model).max(), np.abs(emp_before - model_before).max()))


def fit_power_law(samples, min_tail=10):
    """Discrete power-law MLE with xmin chosen to minimize the KS distance."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    if len(x) < 10:
        raise ValueError("need at least 10 samples")
    if np.any(x < 1) or np.any(x != np.floor(x)):
        raise ValueError("samples must be positive integers")
    if np.all(x == x[0]):
        raise ValueError("all samples identical: power law undefined")
    x = np.sort(x)
    best = None
    for xmin in np.unique(x):
        tail = x[np.searchsorted(x, xmin):]
        if len(tail) < min_tail or tail[-1] == tail[0]:
            continue
        a = _zeta_mle(tail, xmin)
        ks = _ks(tail, a, xmin)
        if best is None or ks < best.ks:
            best = PowerLawFit(a, int(xmin), ks, len(tail))
    if best is None:
        raise ValueError("no xmin leaves a usable tail")
    return best


# ---------------------------------------------------------------- delurking randomization


@dataclass(frozen=True)
class RandomizationParams:
    t1: float = 25.0
    t2: float = 25.0
    p: float = 0.5
    d: float = 1.0
    seed: int = 0
    stall_limit: int = 10000

    def __post_init__(self):
        if not (0 < self.t1 <= 100 and 0 < self.t2 <= 100):
            raise ValueError("t1 and t2 must be in (0, 100]")
        if self.t1 + self.t2 > 100:
            raise ValueError("t1 + t2 must not exceed 100")
        if not (0 < self.p <= 1):
            raise ValueError("p must be in (0, 1]")
        if self.d < 0:
            raise ValueError("d must be >= 0")


@dataclass
class DelurkResult:
    graph: DirectedGraph
    added: list = field(default_factory=list)
    candidate_count: int = 0
    target: float = 0.0
    exhausted: bool = False


def delurk_randomize(g, ranking, params):
    """Add top->bottom edges by crossing pairs of bottom->top edges.

    Edges (a1, l1), (a2, l2) with a in the bottom-t2% and l in the top-t1% of the ranking yield
    the new edges (l1, a2) and (l2, a1), unless either already exists. Runs until
    |E'| >= d * |E_al| or no admissible pair is left.
    """
    order = _order(ranking)
    n = g.num_nodes
    rng = np.random.default_rng(params.seed)
    k_top = top_count(params.t1, n)
    k_bot = min(top_count(params.t2, n), n - k_top)
    top = np.zeros(n, dtype=bool)
    bot = np.zeros(n, dtype=bool)
    top[order[:k_top]] = True
    bot[order[n - k_bot:] if k_bot else []] = True
    s, d = g.edges()
    m = bot[s] & top[d]
    e_al = np.stack([s[m], d[m]], axis=1) if m.any() else np.zeros((0, 2), dtype=np.int64)
    target = params.d * len(e_al)
    res = DelurkResult(g, [], len(e_al), target, False)
    if params.d == 0:
        return res
    if len(e_al) < 2:
        warnings.warn(f"only {len(e_al)} bottom->top edges; graph returned unchanged", stacklevel=2)
        return res
    existing = set(zip(s.tolist(), d.tolist()))
    added = []
    added_set = set()

    def admissible(i, j):
        a1, l1 = e_al[i]
        a2, l2 = e_al[j]
        if a1 == a2 or l1 == l2:
            return False
        e1, e2 = (int(l1), int(a2)), (int(l2), int(a1))
        return e1 not in existing and e1 not in added_set and e2 not in existing and e2 not in added_set

    def commit(i, j):
        a1, l1 = e_al[i]
        a2, l2 = e_al[j]
        for e in ((int(l1), int(a2)), (int(l2), int(a1))):
            added.append(e)
            added_set.add(e)

    m_al = len(e_al)
    stall = 0
    feasible = None
    while len(added) < target:
        if feasible is None:
            i = int(rng.integers(m_al))
            if rng.random() >= params.p:
                continue
            j = int(rng.integers(m_al))
            if rng.random() >= params.p:
                continue
            if admissible(i, j):
                commit(i, j)
                stall = 0
                continue
            stall += 1
            if stall < params.stall_limit:
                continue
            feasible = [(i, j) for i in range(m_al) for j in range(m_al) if admissible(i, j)]
        else:
            feasible = [pr for pr in feasible if admissible(*pr)]
            if not feasible:
                res.exhausted = True
                warnings.warn(
                    f"delurking target {target:g} unreachable: {len(added)} edges added before "
                    "all candidate pairs were exhausted", stacklevel=2)
                break
            commit(*feasible[int(rng.integers(len(feasible)))])
    if added:
        new = np.asarray(added, dtype=np.int64)
        all_s = np.concatenate([s, new[:, 0]])
        all_d = np.concatenate([d, new[:, 1]])
        w = None
        if g.weighted:
            w = np.concatenate([g.out_w, np.ones(len(new))])
        res.graph = DirectedGraph.from_edges(n, all_s, all_d, w, g.labels)
    res.added = added
    return res


# ---------------------------------------------------------------- topological overlap


def overlaps(g):
    """Directed topological overlap for every edge, in g.edges() order."""
    s, d = g.edges()
    c = kernels.common_neighbors(g.out_ptr, g.out_idx, g.in_ptr, g.in_idx, s, d,
                                 nthreads=get_threads()).astype(np.float64)
    den = (g.raw_out[s] - 1.0) + (g.raw_in[d] - 1.0) - c
    return np.divide(c, den, out=np.zeros(len(s)), where=den > 0)


def directed_topological_overlap(g, i, j):
    """|R_i & B_j| / ((|R_i|-1) + (|B_j|-1) - |R_i & B_j|); 0 when the denominator is <= 0."""
    if not g.has_edge(i, j):
        raise ValueError(f"edge ({i}, {j}) not in graph")
    r = g.out_neighbors(i)
    b = g.in_neighbors(j)
    c = len(np.intersect1d(r, b, assume_unique=True))
    den = (len(r) - 1) + (len(b) - 1) - c
    return c / den if den > 0 else 0.0


def _edges_by_overlap(g):
    s, d = g.edges()
    ov = overlaps(g)
    order = np.lexsort((d, s, ov))
    return s[order], d[order], ov[order]


def percolation_match(g, ranking, lurker_fraction=25, percents=(1, 5, 10)):
    """Sweep edges by increasing overlap; for each percent q, collect endpoints of the lowest
    ceil(q% |E|) edges and report how many top lurkers they contain.
    """
    order = _order(ranking)
    n = g.num_nodes
    lurkers = order[: top_count(lurker_fraction, n)]
    s, d, _ = _edges_by_overlap(g)
    m = len(s)
    # first sweep position at which each vertex is touched
    first = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    pos = np.arange(m, dtype=np.int64)
    np.minimum.at(first, s, pos)
    np.minimum.at(first, d, pos)
    rows = []
    for q in percents:
        cut = top_count(q, m)
        removed = first < cut
        rows.append({
            "percent": q,
            "edges_removed": int(cut),
            "vertices_removed": int(removed.sum()),
            "matched": float(removed[lurkers].mean()) if len(lurkers) else 0.0,
            "removed_ratio": float(removed.sum() / n) if n else 0.0,
        })
    return rows


# ---------------------------------------------------------------- resilience


def _removal_order(g, ranking, strategy):
    n = g.num_nodes
    if strategy == "lr-desc":
        return _order(ranking)
    if strategy == "lr-desc-no-sinks":
        order = _order(ranking)
        sink = g.raw_out[order] == 0
        return np.concatenate([order[~sink], order[sink]])
    if strategy == "overlap-asc":
        s, d, _ = _edges_by_overlap(g)
        seq = np.empty(2 * len(s), dtype=np.int64)
        seq[0::2] = s
        seq[1::2] = d
        _, idx = np.unique(seq, return_index=True)
        touched = seq[np.sort(idx)]
        rest = np.setdiff1d(np.arange(n), touched)
        return np.concatenate([touched, rest])
    raise ValueError(f"unknown strategy {strategy!r}")


def resilience_curve(g, ranking, strategy="lr-desc", fractions=None):
    """Largest SCC after removing a share of vertices, over the original largest SCC size."""
    if fractions is None:
        fractions = np.linspace(0, 1, 21)
    fractions = np.asarray(fractions, dtype=np.float64)
    if np.any(np.diff(fractions) < 0) or fractions.min(initial=0) < 0 or fractions.max(initial=0) > 1:
        raise ValueError("fractions must be increasing within [0, 1]")
    n = g.num_nodes
    order = _removal_order(g, ranking, strategy)
    base = _max_scc_size(g)
    out = []
    for f in fractions:
        k = min(n, math.ceil(f * n - 1e-9))
        keep = np.ones(n, dtype=bool)
        keep[order[:k]] = False
        if base == 0:
            out.append(0.0)
            continue
        sub, _ = induced_subgraph(g, np.flatnonzero(keep))
        out.append(_max_scc_size(sub) / base)
    return np.asarray(out)


def _max_scc_size(g):
    if g.num_nodes == 0:
        return 0
    ncomp, labels = scc_labels(g)
    return int(np.bincount(labels, minlength=ncomp).max())
