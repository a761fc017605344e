"""Local and network-level lurking coefficients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import in_out_ratio


@dataclass
class LurkingCoefficientReport:
    lc: np.ndarray
    LC: float
    wLC: float
    weights: np.ndarray
    # conventions used, recorded in every report
    neighborhood: str = "role-multiplicity |B_i|+|R_i|"
    weight_norm: str = "ratio(i) / sum over V_i and i"
    gate: bool = True

    def summary_lines(self):
        return [
            f"LC\t{self.LC!r}",
            f"wLC\t{self.wLC!r}",
            f"# neighborhood={self.neighborhood}; weights={self.weight_norm}; gate={'ratio>=1' if self.gate else 'off'}",
        ]


def _edge_indicators(g, ratio):
    """Per-node indicator sums: in-neighbors with lower ratio plus out-neighbors with ratio >= own."""
    n = g.num_nodes
    s, d = g.edges()
    # edge s -> d: s is an in-neighbor of d, d is an out-neighbor of s
    hits = np.bincount(d, weights=(ratio[s] < ratio[d]).astype(np.float64), minlength=n)
    hits += np.bincount(s, weights=(ratio[d] >= ratio[s]).astype(np.float64), minlength=n)
    return hits


def local_lurking_coefficients(g, gate=True):
    """lc_i for every node; isolated nodes get 0.

    With ``gate`` on, nodes whose in/out ratio is below 1 have lc = 0: they produce more than
    they consume and so cannot be lurkers at all.
    """
    n = g.num_nodes
    ratio = in_out_ratio(g)
    size = (g.raw_in + g.raw_out).astype(np.float64)
    hits = _edge_indicators(g, ratio)
    lc = np.divide(hits, size, out=np.zeros(n), where=size > 0)
    if gate:
        lc[ratio < 1.0] = 0.0
    return lc


def local_lurking_coefficient(g, i, gate=True):
    ratio = in_out_ratio(g)
    if gate and ratio[i] < 1.0:
        return 0.0
    b = g.in_neighbors(i)
    r = g.out_neighbors(i)
    size = len(b) + len(r)
    if size == 0:
        return 0.0
    hits = int((ratio[b] < ratio[i]).sum()) + int((ratio[r] >= ratio[i]).sum())
    return hits / size


def _wlc_weights(g, ratio):
    """p_i = ratio(i) / sum of ratios over the union neighborhood of i plus i itself."""
    n = g.num_nodes
    s, d = g.edges()
    # undirected unique neighbor pairs, so reciprocal neighbors count once
    a = np.minimum(s, d)
    b = np.maximum(s, d)
    pairs = np.unique(a * max(n, 1) + b)
    a, b = pairs // max(n, 1), pairs % max(n, 1)
    nb_sum = ratio.copy()
    nb_sum += np.bincount(a, weights=ratio[b], minlength=n)
    nb_sum += np.bincount(b, weights=ratio[a], minlength=n)
    return ratio / nb_sum


def lurking_coefficient(g, gate=True):
    """LC = mean of lc_i and wLC = (1/|V|) sum p_i lc_i."""
    n = g.num_nodes
    lc = local_lurking_coefficients(g, gate=gate)
    if n == 0:
        return LurkingCoefficientReport(lc, 0.0, 0.0, np.zeros(0), gate=gate)
    p = _wlc_weights(g, in_out_ratio(g))
    return LurkingCoefficientReport(lc, float(lc.mean()), float((p * lc).sum() / n), p, gate=gate)
