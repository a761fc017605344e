import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lurkerrank import (LR_VARIANTS, ActivityTable, DirectedGraph, RankParams, TrustStatements,
                        alpha_centrality, data_driven_rank, fair_bets, in_out_ratio_rank,
                        lurker_rank, pagerank, rank_method, ranking, trust_biased_lurker_rank,
                        trust_oracle_entropy, trustrank)
from lurkerrank.rank import power_iterate
import _oracles as O

ALL_ITERATIVE = list(LR_VARIANTS) + ["pagerank", "alpha-centrality", "fair-bets"]


def G(n, edges, weights=None):
    return DirectedGraph.from_edges(n, [e[0] for e in edges], [e[1] for e in edges], weights)


def raw(params=None, **kw):
    return RankParams(normalize_final=False, **kw)


# ---------------------------------------------------------------- spec examples


def test_lrin_empty_graph_teleport_only():
    rv = lurker_rank(G(3, []), "LRin", raw())
    assert np.allclose(rv.scores, 0.05, atol=1e-15)
    assert list(rv.ranking()) == [0, 1, 2]


def test_lrin_single_edge_fixed_point():
    rv = lurker_rank(G(2, [(0, 1)]), "LRin", raw())
    assert rv.converged
    assert rv.scores == pytest.approx([0.075, 0.2025], abs=1e-12)
    assert list(rv.ranking()) == [1, 0]


@pytest.mark.parametrize("method", ALL_ITERATIVE + ["io"])
def test_two_cycle_tie(method):
    rv = rank_method(G(2, [(0, 1), (1, 0)]), method)
    assert rv.scores[0] == pytest.approx(rv.scores[1], abs=1e-15)
    assert list(rv.ranking()) == [0, 1]


def test_pagerank_examples():
    assert pagerank(G(2, [(0, 1), (1, 0)])).scores == pytest.approx([0.5, 0.5], abs=1e-15)
    assert pagerank(G(1, [])).scores == pytest.approx([1.0])
    chain = [(0, 1), (1, 2)]
    got = pagerank(G(3, chain)).scores
    want, status, _ = O.pagerank_oracle(O.dense_weights(3, chain))
    assert status == "converged"
    assert np.abs(got - want).max() <= 1e-9
    assert np.abs(got - O.pagerank_solve(O.dense_weights(3, chain))).max() <= 1e-9


def test_alpha_centrality_examples():
    rv = alpha_centrality(G(4, []))
    assert np.allclose(rv.scores, 0.25)
    k = 5
    star = [(j, 0) for j in range(1, k + 1)]
    rv = alpha_centrality(G(k + 1, star), RankParams(damping=0.1))
    assert rv.converged and rv.ranking()[0] == 0
    assert all(rv.scores[0] > rv.scores[j] for j in range(1, k + 1))


def test_alpha_centrality_divergence_flagged():
    # complete digraph on 4 nodes: spectral radius 3 * 0.85 > 1, no finite solution
    edges = [(u, v) for u in range(4) for v in range(4) if u != v]
    rv = alpha_centrality(G(4, edges))
    assert not rv.converged
    assert np.all(np.isfinite(rv.scores)) and rv.scores.sum() == pytest.approx(1.0)


def test_fair_bets_examples():
    rv = fair_bets(G(3, []))
    assert np.allclose(rv.scores, 1 / 3) and rv.converged
    # acyclic reading: the update is nilpotent, mass drains out and the uniform reset
    # restarts it, so there is no fixed point to report
    rv = fair_bets(G(4, [(0, 2), (1, 2), (2, 3)]))
    assert not rv.converged and np.all(np.isfinite(rv.scores))
    # reader feeding back to the producers and the consumer (aperiodic): consumer on top
    edges = [(0, 2), (1, 2), (2, 3), (3, 0), (3, 1), (3, 2)]
    rv = fair_bets(G(4, edges))
    assert rv.converged
    assert rv.scores[2] > rv.scores[0] and rv.scores[2] > rv.scores[1]
    want, status, _ = O.fair_bets_oracle(O.dense_weights(4, edges))
    assert np.abs(rv.scores - want).max() <= 1e-9


def test_io_examples():
    assert in_out_ratio_rank(G(1, [])).scores[0] == 1.0
    g = G(4, [(1, 0), (2, 0), (3, 0)])
    assert in_out_ratio_rank(g).scores[0] == 4.0
    g = G(5, [(1, 0), (2, 0), (0, 3), (0, 4)])
    assert in_out_ratio_rank(g).scores[0] == 1.0


def test_invalid_variant():
    with pytest.raises(ValueError):
        lurker_rank(G(2, []), "LRsideways")
    with pytest.raises(ValueError):
        lurker_rank(G(2, []), "pagerank")


@pytest.mark.parametrize("bad", [dict(damping=1.5), dict(damping=-0.1), dict(tol=0), dict(max_iters=0)])
def test_param_validation(bad):
    with pytest.raises(ValueError):
        RankParams(**bad)


def test_non_convergence_flag():
    g = G(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    rv = lurker_rank(g, "LRin", RankParams(max_iters=2))
    assert not rv.converged and rv.iterations == 2


def test_weights_enter_lr_only():
    edges = [(0, 1), (1, 2), (2, 0), (0, 2)]
    w = [5.0, 1.0, 1.0, 0.5]
    plain, weighted = G(3, edges), G(3, edges, w)
    assert not np.allclose(lurker_rank(plain).scores, lurker_rank(weighted).scores)
    W = O.dense_weights(3, edges, w)
    want, _, _ = O.lr_oracle(W, "LRin")
    assert np.abs(lurker_rank(weighted).scores - want).max() <= 1e-9
    assert np.allclose(pagerank(plain).scores, pagerank(weighted).scores)


def test_normalized_scheme_available():
    g = G(4, [(0, 1), (1, 2), (2, 3), (3, 1)])
    rv = lurker_rank(g, "LRin", RankParams(scheme="normalized"))
    assert rv.converged and rv.scores.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        RankParams(scheme="other")


def test_callback_sees_every_iteration():
    seen = []
    g = G(4, [(0, 1), (1, 2), (2, 3), (3, 1)])
    rv = lurker_rank(g, "LRin", callback=lambda it, x: seen.append((it, x.sum())))
    assert [s[0] for s in seen] == list(range(1, rv.iterations + 1))
    assert all(s[1] == pytest.approx(1.0) for s in seen)


# ---------------------------------------------------------------- data-driven


def test_dd_twitter_zero_influence_is_ratio():
    g = G(3, [(1, 0), (2, 0)])
    rv = data_driven_rank(g, ActivityTable({"retweets": {}}), "twitter")
    assert rv.scores[0] == 3.0


def test_dd_friendfeed_no_activity_is_ratio():
    g = G(3, [(1, 0), (2, 0), (0, 1)])
    rv = data_driven_rank(g, ActivityTable({"posts": {}}, {}), "friendfeed")
    assert np.allclose(rv.scores, in_out_ratio_rank(g).scores)


def test_dd_twitter_fixture():
    # 0 is a sink followed by 1,2,3 (in 4, out 1); 4 reads 1 and 2
    edges = [(1, 0), (2, 0), (3, 0), (4, 1), (4, 2), (1, 2)]
    rt = {0: 7, 1: 2, 2: 5, 3: 0, 4: 1}
    g = G(5, edges)
    got = data_driven_rank(g, ActivityTable({"retweets": rt}), "twitter").scores
    ins = {i: 1 + sum(1 for u, v in edges if v == i) for i in range(5)}
    outs = {i: 1 + sum(1 for u, v in edges if u == i) for i in range(5)}
    for i in range(5):
        ei = sum(rt[v] for u, v in edges if u == i) / outs[i]
        assert got[i] == pytest.approx(ins[i] / outs[i] * math.exp(-ei), rel=1e-14)
    assert got[0] == 4.0


def test_dd_friendfeed_fixture():
    edges = [(0, 1), (1, 2), (0, 2)]
    g = G(3, edges)
    pairs = {(1, 0): 3, (2, 0): 1, (2, 1): 4}
    posts = {0: 90, 1: 0, 2: 5}
    got = data_driven_rank(g, ActivityTable({"posts": posts}, pairs), "friendfeed").scores
    # node 0: R_0 = {1, 2}; comments from 1 and 2 on 0 -> 4; out_s = 3
    assert got[0] == pytest.approx((1 / 3) * math.exp(-(4 / 3) * math.log10(100)))
    assert got[1] == pytest.approx(1.0 * math.exp(-(4 / 2) * 1.0))


def test_dd_flickr_and_missing_counters():
    g = G(2, [(0, 1)])
    rv = data_driven_rank(g, ActivityTable({"favorites": {1: 2}}), "flickr-favorites")
    assert rv.scores[1] == pytest.approx(2.0 * math.exp(-2.0))
    with pytest.raises(ValueError, match="views"):
        data_driven_rank(g, ActivityTable({"favorites": {}}), "flickr-views")
    with pytest.raises(ValueError, match="comments, posts"):
        data_driven_rank(g, ActivityTable({}), "friendfeed")


# ---------------------------------------------------------------- trust


def test_entropy_examples():
    # trust graph: 1,2,3 trust 0 equally; 4 trusts 5 alone; 6 and 7 trust 8 with counts 3 and 1
    edges = [(1, 0), (2, 0), (3, 0), (4, 5), (6, 8), (7, 8)]
    et = {(1, 0): 2, (2, 0): 2, (3, 0): 2, (4, 5): 9, (6, 8): 3, (7, 8): 1}
    o = trust_oracle_entropy(TrustStatements(et), G(9, edges))
    assert o.entropy[0] == pytest.approx(1.0)
    assert o.entropy[5] == 0.0 and not o.eligible[5]
    assert o.entropy[8] == pytest.approx(0.8113, abs=1e-4)
    assert list(o.seeds) == [0]


def test_entropy_missing_statements_count_as_zero():
    o = trust_oracle_entropy(TrustStatements({}), G(3, [(1, 0), (2, 0)]))
    assert o.entropy[0] == 0.0 and len(o.seeds) == 0


def test_trust_statements_validate():
    with pytest.raises(ValueError):
        TrustStatements({(0, 1): -1})


def test_trustrank_examples():
    edges = [(0, 1), (1, 2), (2, 0), (0, 2)]
    g = G(3, edges)
    assert list(trustrank(g, [0, 1, 2]).ranking()) == list(pagerank(g).ranking())
    assert np.allclose(trustrank(g, range(3)).scores, pagerank(g).scores, atol=1e-12)
    rv = trustrank(G(3, []), [1])
    assert rv.scores == pytest.approx([0, 1, 0], abs=1e-15)
    chain = [(0, 1), (1, 2)]
    v = np.array([1.0, 0, 0])
    got = trustrank(G(3, chain), [0]).scores
    want, _, _ = O.pagerank_oracle(O.dense_weights(3, chain), teleport=v)
    assert np.abs(got - want).max() <= 1e-9
    assert np.abs(got - O.pagerank_solve(O.dense_weights(3, chain), teleport=v)).max() <= 1e-9
    with pytest.raises(ValueError):
        trustrank(g, [])


@pytest.mark.parametrize("variant", LR_VARIANTS)
def test_trust_biased_reductions(variant):
    g = G(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)])
    t = np.full(5, 1 / 5)
    assert list(trust_biased_lurker_rank(g, t, variant).ranking()) == list(lurker_rank(g, variant).ranking())
    x = np.zeros(5)
    x[3] = 1.0
    assert trust_biased_lurker_rank(G(5, []), x, variant).ranking()[0] == 3
    with pytest.raises(ValueError):
        trust_biased_lurker_rank(g, np.ones(4) / 4, variant)


# ---------------------------------------------------------------- properties


@st.composite
def small_graphs(draw, min_n=1, max_n=12):
    n = draw(st.integers(min_n, max_n))
    p = draw(st.floats(0.05, 0.6))
    seed = draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    edges = O.random_edges(rng, n, p)
    weighted = draw(st.booleans())
    w = list(rng.uniform(0.2, 3.0, len(edges))) if weighted else None
    return n, edges, w


def _oracle_for(method, W, d=0.85):
    if method in LR_VARIANTS:
        return O.lr_oracle(W, method, d)
    if method == "pagerank":
        return O.pagerank_oracle(W, d)
    if method == "alpha-centrality":
        return O.alpha_oracle(W, d)
    return O.fair_bets_oracle(W)


@settings(max_examples=60, deadline=None)
@given(small_graphs(), st.sampled_from(ALL_ITERATIVE), st.sampled_from([0.0, 0.3, 0.85]))
def test_matches_dense_oracle(gr, method, d):
    n, edges, w = gr
    g = G(n, edges, w)
    rv = rank_method(g, method, RankParams(damping=d))
    want, status, it = _oracle_for(method, O.dense_weights(n, edges, w), d)
    assert rv.converged == (status == "converged")
    assert np.abs(rv.scores - want).max() <= 1e-9


@settings(max_examples=60, deadline=None)
@given(small_graphs(), st.sampled_from(ALL_ITERATIVE))
def test_fixed_point_residual(gr, method):
    n, edges, w = gr
    g = G(n, edges, w)
    params = RankParams()
    rv = rank_method(g, method, params)
    if not rv.converged:
        return
    W = O.dense_weights(n, edges, w)
    # one more step of the oracle started from the returned point stays within 10 tol
    if method in LR_VARIANTS:
        base = method.replace("ac-", "")
        c = np.ones(n) if method.startswith("ac-") else np.full(n, 0.15 / n)
        r = lurker_rank(g, method, raw()).scores
        Min, Mout = O.lr_in_matrix(W), O.lr_out_matrix(W)
        if base == "LRin":
            nxt = 0.85 * Min @ r + c
        elif base == "LRout":
            nxt = 0.85 * Mout @ r + c
        else:
            nxt = 0.85 * (Min @ r) * (1 + Mout @ r) + c
        assert np.abs(nxt / nxt.sum() - rv.scores).sum() <= 10 * params.tol
    elif method == "fair-bets":
        A = (W > 0).astype(float)
        nxt = (A.T @ rv.scores) / (A.sum(axis=1) + 1)
        nxt = nxt / nxt.sum() if nxt.sum() > 0 else np.full(n, 1 / n)
        assert np.abs(nxt - rv.scores).sum() <= 10 * params.tol


@settings(max_examples=60, deadline=None)
@given(small_graphs(min_n=2), st.sampled_from(list(LR_VARIANTS) + ["pagerank", "alpha-centrality"]))
def test_final_normalization_preserves_ranking(gr, method):
    n, edges, w = gr
    g = G(n, edges, w)
    a = rank_method(g, method, RankParams())
    b = rank_method(g, method, raw())
    assert list(a.ranking()) == list(b.ranking())
    if a.converged:
        assert np.allclose(a.scores, b.scores / b.scores.sum(), rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("method", ALL_ITERATIVE + ["io"])
@pytest.mark.parametrize("kind", ["cycle", "complete"])
def test_vertex_transitive_symmetry(method, kind):
    n = 6
    if kind == "cycle":
        edges = [(i, (i + 1) % n) for i in range(n)]
    else:
        edges = [(u, v) for u in range(n) for v in range(n) if u != v]
    rv = rank_method(G(n, edges), method)
    assert np.ptp(rv.scores) <= 1e-12 * max(1.0, abs(rv.scores).max())


@settings(max_examples=40, deadline=None)
@given(small_graphs())
def test_zero_damping_is_uniform(gr):
    n, edges, w = gr
    g = G(n, edges, w)
    for v in ("LRin", "LRout", "LRin-out"):
        rv = lurker_rank(g, v, RankParams(damping=0.0))
        assert np.all(rv.scores == rv.scores[0]) and rv.scores.sum() == pytest.approx(1.0)
    assert np.all(pagerank(g, RankParams(damping=0.0)).scores == pytest.approx(1 / n))


@settings(max_examples=40, deadline=None)
@given(small_graphs(min_n=2))
def test_scores_nonnegative_and_normalized(gr):
    n, edges, w = gr
    g = G(n, edges, w)
    for m in ALL_ITERATIVE:
        s = rank_method(g, m).scores
        assert len(s) == n and np.all(s >= 0) and s.sum() == pytest.approx(1.0)


def test_ranking_tie_break_by_id():
    assert list(ranking([1.0, 3.0, 1.0, 3.0])) == [1, 3, 0, 2]


def test_power_iterate_linear_solve_cross_check():
    rng = np.random.default_rng(3)
    M = rng.random((6, 6)) * 0.1
    c = rng.random(6)
    got, it, conv, growth = power_iterate(lambda x, s: M @ x, c, 6, RankParams(normalize_final=False, tol=1e-13))
    assert conv and growth == pytest.approx(1.0)
    assert np.abs(got - np.linalg.solve(np.eye(6) - M, c)).max() <= 1e-9
