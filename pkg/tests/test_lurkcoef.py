import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lurkerrank import (DirectedGraph, local_lurking_coefficient, local_lurking_coefficients,
                        lurking_coefficient)
import _oracles as O


def G(n, edges):
    return DirectedGraph.from_edges(n, [e[0] for e in edges], [e[1] for e in edges])


def test_single_lower_in_neighbor():
    # 1 <- 0: ratio(0) = 1/2 < ratio(1) = 2
    assert local_lurking_coefficient(G(2, [(0, 1)]), 1) == 1.0


def test_isolated_node_zero():
    assert local_lurking_coefficient(G(1, []), 0) == 0.0


def test_mixed_neighbors_half():
    # i=0 has in-neighbor 1 and out-neighbor 2, both with higher ratio than ratio(0) = 1
    edges = [(1, 0), (0, 2), (3, 1), (4, 1), (5, 2)]
    g = G(6, edges)
    assert local_lurking_coefficient(g, 0) == 0.5


def test_empty_graph_lc_zero():
    assert lurking_coefficient(G(5, [])).LC == 0.0


def test_two_cycle_half():
    rep = lurking_coefficient(G(2, [(0, 1), (1, 0)]))
    assert list(rep.lc) == [0.5, 0.5] and rep.LC == 0.5


@pytest.mark.parametrize("k", [1, 2, 3, 7, 20])
def test_star_of_sinks(k):
    rep = lurking_coefficient(G(k + 1, [(0, j) for j in range(1, k + 1)]))
    assert rep.lc[0] == 0.0 and all(rep.lc[1:] == 1.0)
    assert rep.LC == pytest.approx(k / (k + 1), abs=1e-15)


def test_ungated_literal_source():
    # without the ratio gate, the star source scores 1 (all out-neighbors have ratio >= its own)
    rep = lurking_coefficient(G(4, [(0, 1), (0, 2), (0, 3)]), gate=False)
    assert rep.lc[0] == 1.0 and rep.LC == 1.0


def test_wlc_isolated_reduces_to_unweighted():
    rep = lurking_coefficient(G(3, []))
    assert np.all(rep.weights == 1.0)


def test_wlc_weights_by_hand():
    # 0 -> 1, 1 -> 0, 2 -> 1: ratios 1, 3/2, 1/2
    rep = lurking_coefficient(G(3, [(0, 1), (1, 0), (2, 1)]))
    r = np.array([1.0, 1.5, 0.5])
    assert rep.weights[0] == pytest.approx(r[0] / (r[0] + r[1]))
    assert rep.weights[1] == pytest.approx(r[1] / (r.sum()))
    assert rep.weights[2] == pytest.approx(r[2] / (r[2] + r[1]))
    assert rep.wLC == pytest.approx((rep.weights * rep.lc).sum() / 3)


def test_report_records_conventions():
    lines = lurking_coefficient(G(2, [(0, 1)])).summary_lines()
    assert lines[0].startswith("LC\t") and lines[1].startswith("wLC\t")
    assert "gate=ratio>=1" in lines[2]


@st.composite
def graphs(draw, max_n=10):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**31 - 1))
    p = draw(st.floats(0.0, 0.7))
    return n, O.random_edges(np.random.default_rng(seed), n, p)


@settings(max_examples=300, deadline=None)
@given(graphs(), st.booleans())
def test_bruteforce_equivalence(gr, gate):
    n, edges = gr
    g = G(n, edges)
    lc = local_lurking_coefficients(g, gate=gate)
    want = O.brute_lc(n, edges, gate=gate)
    assert np.allclose(lc, want, atol=0, rtol=0)
    assert np.all((lc >= 0) & (lc <= 1))
    for i in range(n):
        assert local_lurking_coefficient(g, i, gate=gate) == want[i]
    rep = lurking_coefficient(g, gate=gate)
    assert rep.LC == pytest.approx(np.mean(want)) and rep.wLC >= 0


@settings(max_examples=100, deadline=None)
@given(graphs(), st.integers(0, 10**6))
def test_relabel_invariance(gr, seed):
    n, edges = gr
    perm = np.random.default_rng(seed).permutation(n)
    a = lurking_coefficient(G(n, edges))
    b = lurking_coefficient(G(n, [(perm[u], perm[v]) for u, v in edges]))
    assert a.LC == pytest.approx(b.LC, abs=1e-14) and a.wLC == pytest.approx(b.wLC, abs=1e-14)
    assert np.allclose(a.lc, b.lc[perm])
