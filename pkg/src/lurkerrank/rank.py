"""Node scoring: LurkerRank variants, competitor centralities, data-driven and trust-biased ranks.

All iterative methods share one power-iteration engine. Affine updates ``r <- F(r) + c`` are run
in homogeneous coordinates ``(x, sigma)`` (``r = x / sigma``) with joint L1 normalization, so the
returned direction is the true fixed point of the unnormalized update whenever one exists, and
finite values are kept even when the update diverges.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Optional

import numpy as np

from ._core import get_threads

LR_VARIANTS = ("LRin", "LRout", "LRin-out", "ac-LRin", "ac-LRout", "ac-LRin-out")
METHODS = LR_VARIANTS + ("pagerank", "alpha-centrality", "fair-bets", "io")
DD_FLAVORS = {
    "twitter": ("retweets",),
    "friendfeed": ("comments", "posts"),
    "flickr-favorites": ("favorites",),
    "flickr-views": ("views",),
}


@dataclass(frozen=True)
class RankParams:
    damping: float = 0.85
    max_iters: int = 200
    tol: float = 1e-9
    normalize_final: bool = True
    # "affine": fixed point of the unnormalized update; "normalized": x <- F(x)/|F(x)|
    scheme: str = "affine"

    def __post_init__(self):
        if not (0.0 <= self.damping <= 1.0):
            raise ValueError(f"damping must be in [0, 1], got {self.damping}")
        if not (self.tol > 0):
            raise ValueError("tolerance must be > 0")
        if int(self.max_iters) < 1:
            raise ValueError("max_iters must be >= 1")
        if self.scheme not in ("affine", "normalized"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


@dataclass
class RankVector:
    scores: np.ndarray
    method: str
    params: dict = field(default_factory=dict)
    iterations: int = 0
    converged: bool = True

    def __len__(self):
        return len(self.scores)

    def ranking(self):
        return ranking(self.scores)

    def normalized(self):
        return _l1(self.scores)


def ranking(scores):
    """Node ids by decreasing score, ties by ascending id."""
    return np.argsort(-np.asarray(scores, dtype=np.float64), kind="stable")


def canonical_variant(name):
    low = name.strip().lower().replace("_", "-")
    for v in METHODS:
        if v.lower() == low:
            return v
    aliases = {"lrinout": "LRin-out", "ac-lrinout": "ac-LRin-out", "pr": "pagerank",
               "ac": "alpha-centrality", "fb": "fair-bets", "fairbets": "fair-bets",
               "in-out": "io", "inout": "io", "alpha": "alpha-centrality"}
    if low in aliases:
        return aliases[low]
    raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")


def _l1(x):
    s = x.sum()
    if s > 0 and math.isfinite(s):
        return x / s
    return np.full(len(x), 1.0 / len(x)) if len(x) else x


def _growth_tol(tol):
    return max(1e-6, 10 * tol)


def power_iterate(endo, const, n, params, callback=None):
    """Fixed point of r = endo(r) + const.

    ``endo(x, sigma)`` must satisfy endo(a*x, a*sigma) = a*endo(x, sigma). Returns
    (scores, iterations, converged, growth). ``scores`` is normalized when
    ``params.normalize_final`` is set or when no finite fixed point was reached.
    """
    if n == 0:
        return np.zeros(0), 0, True, 1.0
    if params.scheme == "normalized":
        return _iterate_normalized(endo, const, n, params, callback)
    has_const = const is not None and np.any(const != 0)
    x = np.full(n, 1.0 / n)
    sigma = 1.0
    x_dir = x.copy()
    it = 0
    converged = False
    diverged = False
    growth = prev_growth = math.nan
    for it in range(1, params.max_iters + 1):
        y = endo(x, sigma)
        if has_const:
            y = y + sigma * const
        total = y.sum() + sigma
        if not (math.isfinite(total) and total > 0):
            diverged = True
            it -= 1
            break
        growth = total
        y /= total
        new_sigma = sigma / total
        ys = y.sum()
        if not (ys > 0):
            # zero endogenous mass and zero constant: nothing to rank
            y_dir = np.full(n, 1.0 / n)
        else:
            y_dir = y / ys
        delta = np.abs(y_dir - x_dir).sum()
        x, sigma, x_dir = y, new_sigma, y_dir
        if callback is not None:
            callback(it, x_dir)
        if delta <= params.tol:
            gtol = _growth_tol(params.tol)
            if not has_const or abs(growth - 1.0) <= gtol:
                converged = True
                break
            if abs(growth - prev_growth) <= gtol:
                # direction settled but the scale keeps changing: no finite fixed point
                diverged = True
                break
        prev_growth = growth
        if has_const and sigma < 1e-250:
            diverged = True
            break
    if params.normalize_final or diverged or not has_const:
        return x_dir, it, converged, growth
    return x / sigma, it, converged, growth


def _iterate_normalized(endo, const, n, params, callback):
    x = np.full(n, 1.0 / n)
    converged = False
    it = 0
    raw = x
    for it in range(1, params.max_iters + 1):
        raw = endo(x, 1.0)
        if const is not None:
            raw = raw + const
        s = raw.sum()
        if not (math.isfinite(s)):
            it -= 1
            break
        y = raw / s if s > 0 else np.full(n, 1.0 / n)
        delta = np.abs(y - x).sum()
        x = y
        if callback is not None:
            callback(it, x)
        if delta <= params.tol:
            converged = True
            break
    if params.normalize_final:
        return x, it, converged, 1.0
    return raw, it, converged, 1.0


def _params_dict(params, **extra):
    d = asdict(params)
    d.update(extra)
    return d


def _threads():
    return get_threads()


def _lr_operators(g, variant):
    """Return endo(x, sigma) for a LurkerRank variant (without the constant term)."""
    nt = _threads()
    in_s = g.raw_in + 1.0
    out_s = g.raw_out + 1.0
    base = variant.replace("ac-", "")

    def in_term(x):
        # (1/out(i)) sum_{j in B_i} w(j,i) out(j)/in(j) x_j
        return g.in_gather(x * (out_s / in_s), nthreads=nt) / out_s

    if base in ("LRout", "LRin-out"):
        den = g.out_gather_unweighted(in_s, nthreads=nt)
        coef = np.divide(in_s, den, out=np.zeros_like(den), where=den > 0)

        def out_term(x):
            # in(i)/sum_{j in R_i} in(j) * sum_{j in R_i} w(i,j) in(j)/out(j) x_j ; 0 for sinks
            return coef * g.out_gather(x * (in_s / out_s), nthreads=nt)

    if base == "LRin":
        return lambda x, s: in_term(x)
    if base == "LRout":
        return lambda x, s: out_term(x)

    def inout(x, s):
        return in_term(x) * (s + out_term(x)) / s

    return inout


def _check_variant(variant):
    v = canonical_variant(variant)
    if v not in LR_VARIANTS:
        raise ValueError(f"invalid LurkerRank variant {variant!r}; choose from {', '.join(LR_VARIANTS)}")
    return v


def _lr(g, variant, params, teleport, method_tag, callback=None):
    n = g.num_nodes
    d = params.damping
    core = _lr_operators(g, variant)
    if variant.startswith("ac-"):
        const = n * teleport
    else:
        const = (1.0 - d) * teleport

    def endo(x, s):
        return d * core(x, s)

    scores, it, conv, growth = power_iterate(endo, const, n, params, callback)
    return RankVector(scores, method_tag, _params_dict(params, growth=growth), it, conv)


def lurker_rank(g, variant="LRin", params=None, callback=None):
    """LurkerRank scores for one of LRin, LRout, LRin-out and their ac- counterparts."""
    params = params or RankParams()
    variant = _check_variant(variant)
    n = g.num_nodes
    return _lr(g, variant, params, np.full(n, 1.0 / n) if n else np.zeros(0), variant, callback)


def trust_biased_lurker_rank(g, trust_vector, variant="LRin", params=None, callback=None):
    """LurkerRank with the uniform teleport/exogenous vector replaced by ``trust_vector``."""
    params = params or RankParams()
    variant = _check_variant(variant)
    t = np.asarray(getattr(trust_vector, "scores", trust_vector), dtype=np.float64)
    if t.shape != (g.num_nodes,):
        raise ValueError(f"trust vector has length {t.size}, graph has {g.num_nodes} nodes")
    if np.any(t < 0):
        raise ValueError("trust vector must be non-negative")
    return _lr(g, variant, params, t, f"trust-{variant}", callback)


def _pagerank_core(g, params, teleport, tag, callback=None):
    n = g.num_nodes
    d = params.damping
    nt = _threads()
    out_raw = g.raw_out.astype(np.float64)
    dangling = out_raw == 0
    inv_out = np.divide(1.0, out_raw, out=np.zeros(n), where=~dangling)

    def endo(x, s):
        return d * (g.in_gather_unweighted(x * inv_out, nthreads=nt) + x[dangling].sum() * teleport)

    scores, it, conv, growth = power_iterate(endo, (1.0 - d) * teleport, n, params, callback)
    return RankVector(scores, tag, _params_dict(params, growth=growth), it, conv)


def pagerank(g, params=None, callback=None):
    """Classic PageRank on raw out-degrees; dangling mass is spread uniformly."""
    params = params or RankParams()
    n = g.num_nodes
    return _pagerank_core(g, params, np.full(n, 1.0 / n) if n else np.zeros(0), "pagerank", callback)


def trustrank(g_trust, seeds, params=None, callback=None):
    """PageRank on the trust graph with teleportation uniform over ``seeds``.

    Dangling mass follows the teleport vector, so the result stays a distribution.
    """
    params = params or RankParams()
    seeds = np.unique(np.asarray(list(seeds), dtype=np.int64))
    if len(seeds) == 0:
        raise ValueError("seed set must be non-empty")
    if seeds.min() < 0 or seeds.max() >= g_trust.num_nodes:
        raise ValueError("seed id out of range")
    v = np.zeros(g_trust.num_nodes)
    v[seeds] = 1.0 / len(seeds)
    rv = _pagerank_core(g_trust, params, v, "trustrank", callback)
    rv.params["num_seeds"] = int(len(seeds))
    return rv


def alpha_centrality(g, params=None, callback=None):
    """r = d A^T r + 1, iterated with joint normalization; divergence sets converged=False."""
    params = params or RankParams()
    n = g.num_nodes
    d = params.damping
    nt = _threads()

    def endo(x, s):
        return d * g.in_gather_unweighted(x, nthreads=nt)

    scores, it, conv, growth = power_iterate(endo, np.ones(n), n, params, callback)
    return RankVector(scores, "alpha-centrality", _params_dict(params, growth=growth), it, conv)


def fair_bets(g, params=None, callback=None):
    """r_i = (1/out(i)) sum_{j in B_i} r_j with smoothed out-degree, L1-normalized each step."""
    params = params or RankParams()
    n = g.num_nodes
    nt = _threads()
    inv_out = 1.0 / (g.raw_out + 1.0)
    if n == 0:
        return RankVector(np.zeros(0), "fair-bets", _params_dict(params), 0, True)
    x = np.full(n, 1.0 / n)
    converged = False
    it = 0
    for it in range(1, params.max_iters + 1):
        y = g.in_gather_unweighted(x, nthreads=nt) * inv_out
        s = y.sum()
        y = y / s if s > 0 else np.full(n, 1.0 / n)
        delta = np.abs(y - x).sum()
        x = y
        if callback is not None:
            callback(it, x)
        if delta <= params.tol:
            converged = True
            break
    return RankVector(x, "fair-bets", _params_dict(params), it, converged)


def in_out_ratio_rank(g, params=None):
    """Smoothed in(i)/out(i); never normalized."""
    scores = (g.raw_in + 1.0) / (g.raw_out + 1.0)
    return RankVector(scores, "io", {}, 0, True)


def rank_method(g, method, params=None, callback=None):
    """Dispatch by method name (any LR variant, pagerank, alpha-centrality, fair-bets, io)."""
    m = canonical_variant(method)
    if m in LR_VARIANTS:
        return lurker_rank(g, m, params, callback)
    if m == "pagerank":
        return pagerank(g, params, callback)
    if m == "alpha-centrality":
        return alpha_centrality(g, params, callback)
    if m == "fair-bets":
        return fair_bets(g, params, callback)
    return in_out_ratio_rank(g, params)


# ---------------------------------------------------------------- data-driven


@dataclass
class ActivityTable:
    """Per-node counters (keyed by node id) plus per-pair comment counts.

    ``counters["retweets"][i]`` etc. ``pair_comments[(j, i)]`` counts comments j left on i's posts.
    A counter absent from ``counters`` is missing; absent node entries read as 0.
    """

    counters: dict = field(default_factory=dict)
    pair_comments: Optional[Mapping] = None

    def has(self, name):
        if name == "comments":
            return self.pair_comments is not None
        return name in self.counters

    def column(self, name, n):
        col = np.zeros(n)
        src = self.counters.get(name, {})
        if isinstance(src, np.ndarray):
            col[: len(src)] = src[:n]
            return col
        for k, v in src.items():
            if 0 <= k < n:
                col[k] = v
        return col


def data_driven_rank(g, activity, flavor):
    """(in(i)/out(i)) * exp(-EI(i)) with a flavor-specific empirical influence EI."""
    if flavor not in DD_FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}; choose from {', '.join(DD_FLAVORS)}")
    missing = [c for c in DD_FLAVORS[flavor] if not activity.has(c)]
    if missing:
        raise ValueError(f"activity table lacks counters for flavor {flavor}: {', '.join(missing)}")
    n = g.num_nodes
    in_s = g.raw_in + 1.0
    out_s = g.raw_out + 1.0
    if flavor == "twitter":
        rt = activity.column("retweets", n)
        ei = g.out_gather_unweighted(rt, nthreads=_threads()) / out_s
    elif flavor == "friendfeed":
        com = np.zeros(n)
        for (j, i), c in activity.pair_comments.items():
            # only comments along a consumption edge i -> j (j in R_i) count
            if 0 <= i < n and 0 <= j < n and g.has_edge(i, j):
                com[i] += c
        posts = activity.column("posts", n)
        ei = (com / out_s) * np.log10(posts + 10.0)
    else:
        key = DD_FLAVORS[flavor][0]
        ei = activity.column(key, n) / out_s
    scores = (in_s / out_s) * np.exp(-ei)
    return RankVector(scores, f"dd-{flavor}", {"flavor": flavor}, 0, True)


# ---------------------------------------------------------------- trust


@dataclass
class TrustStatements:
    """ET(j, i): count of trust indications from j to i."""

    counts: dict = field(default_factory=dict)

    def __post_init__(self):
        for k, v in self.counts.items():
            if v < 0 or int(v) != v:
                raise ValueError(f"trust count for {k} must be a non-negative integer")

    def get(self, j, i):
        return self.counts.get((j, i), 0)


@dataclass
class TrustOracle:
    entropy: np.ndarray
    eligible: np.ndarray
    threshold: float
    seeds: np.ndarray


def trust_oracle_entropy(trust, g_trust):
    """Normalized entropy of the ET distribution over each node's trusters in ``g_trust``.

    H(i) = 0 when i has fewer than two trusters or zero total trust. Good seeds are eligible
    nodes (>= 2 trusters, positive total) with H at or above the 75th percentile of eligible H.
    """
    n = g_trust.num_nodes
    H = np.zeros(n)
    eligible = np.zeros(n, dtype=bool)
    for i in range(n):
        trusters = g_trust.in_neighbors(i)
        k = len(trusters)
        if k < 2:
            continue
        et = np.array([trust.get(int(j), i) for j in trusters], dtype=np.float64)
        tot = et.sum()
        if tot <= 0:
            continue
        eligible[i] = True
        p = et[et > 0] / tot
        H[i] = float(-(p * np.log(p)).sum() / math.log(k))
    H = np.clip(H, 0.0, 1.0)
    if eligible.any():
        thr = float(np.percentile(H[eligible], 75))
        seeds = np.flatnonzero(eligible & (H >= thr))
    else:
        thr = float("nan")
        seeds = np.zeros(0, dtype=np.int64)
    return TrustOracle(H, eligible, thr, seeds)
