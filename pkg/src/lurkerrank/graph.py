"""Immutable directed graphs in CSR form (both orientations) and structural primitives."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from ._core import kernels


class EdgeListError(ValueError):
    """Malformed edge-list input; ``lineno`` is 1-based."""

    def __init__(self, msg, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            msg = f"line {lineno}: {msg}"
        super().__init__(msg)


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _csr(n, rows, cols, w):
    """Rows/cols already sorted by (row, col)."""
    counts = np.bincount(rows, minlength=n) if n else np.zeros(0, dtype=np.int64)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, cols.astype(np.int32), w


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """Simple directed graph; edge (u, v) means v consumes what u produces.

    ``out_idx[out_ptr[i]:out_ptr[i+1]]`` is R_i (sorted) and ``in_idx[in_ptr[i]:in_ptr[i+1]]``
    is B_i (sorted). Weights are ``None`` for unweighted graphs.
    """

    num_nodes: int
    out_ptr: np.ndarray
    out_idx: np.ndarray
    in_ptr: np.ndarray
    in_idx: np.ndarray
    out_w: Optional[np.ndarray] = None
    in_w: Optional[np.ndarray] = None
    labels: Optional[tuple] = None
    self_loops_dropped: int = 0
    duplicates_dropped: int = 0

    @classmethod
    def from_edges(cls, n, src, dst, weights=None, labels=None, dedupe=True):
        """Build from parallel arrays. Self-loops are dropped, duplicates merged (weights summed)."""
        n = int(n)
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        if len(src) and (src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n):
            raise ValueError("edge endpoint out of range")
        w = None
        if weights is not None:
            w = np.asarray(weights, dtype=np.float64).ravel()
            if w.shape != src.shape:
                raise ValueError("weights must match edges")
            if len(w) and not np.all(w > 0):
                raise ValueError("edge weights must be > 0")
        loops = src == dst
        n_loops = int(loops.sum())
        if n_loops:
            keep = ~loops
            src, dst = src[keep], dst[keep]
            if w is not None:
                w = w[keep]
        key = src * max(n, 1) + dst
        ukey, inv = np.unique(key, return_inverse=True)
        n_dup = len(key) - len(ukey)
        if n_dup and not dedupe:
            raise ValueError("duplicate edges present")
        if w is not None:
            w = np.bincount(inv.ravel(), weights=w, minlength=len(ukey))
        s = ukey // max(n, 1)
        d = ukey % max(n, 1)
        out_ptr, out_idx, out_w = _csr(n, s, d, w)
        order = np.lexsort((s, d))
        in_ptr, in_idx, in_w = _csr(n, d[order], s[order], None if w is None else w[order])
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise ValueError("labels must have one entry per node")
        return cls(
            n,
            _readonly(out_ptr), _readonly(out_idx), _readonly(in_ptr), _readonly(in_idx),
            None if out_w is None else _readonly(out_w),
            None if in_w is None else _readonly(in_w),
            labels, n_loops, int(n_dup),
        )

    @property
    def num_edges(self):
        return int(self.out_ptr[-1]) if self.num_nodes else 0

    @property
    def weighted(self):
        return self.out_w is not None

    def __len__(self):
        return self.num_nodes

    def __repr__(self):
        return f"DirectedGraph(num_nodes={self.num_nodes}, num_edges={self.num_edges}, weighted={self.weighted})"

    def edges(self):
        """(src, dst) arrays in (src, dst) lexicographic order."""
        src = np.repeat(np.arange(self.num_nodes, dtype=np.int64), np.diff(self.out_ptr))
        return src, self.out_idx.astype(np.int64)

    def edge_weights(self):
        return np.ones(self.num_edges) if self.out_w is None else self.out_w

    def out_neighbors(self, i):
        return self.out_idx[self.out_ptr[i]:self.out_ptr[i + 1]]

    def in_neighbors(self, i):
        return self.in_idx[self.in_ptr[i]:self.in_ptr[i + 1]]

    def has_edge(self, u, v):
        nb = self.out_neighbors(u)
        k = np.searchsorted(nb, v)
        return bool(k < len(nb) and nb[k] == v)

    @cached_property
    def raw_out(self):
        return _readonly(np.diff(self.out_ptr))

    @cached_property
    def raw_in(self):
        return _readonly(np.diff(self.in_ptr))

    @cached_property
    def in_gather(self):
        """x -> sum_{j in B_i} w(j,i) x_j."""
        return kernels.Gather(self.in_ptr, self.in_idx, self.in_w)

    @cached_property
    def in_gather_unweighted(self):
        return kernels.Gather(self.in_ptr, self.in_idx, None)

    @cached_property
    def out_gather(self):
        """x -> sum_{j in R_i} w(i,j) x_j."""
        return kernels.Gather(self.out_ptr, self.out_idx, self.out_w)

    @cached_property
    def out_gather_unweighted(self):
        return kernels.Gather(self.out_ptr, self.out_idx, None)

    def reverse(self):
        """Same nodes, every edge flipped."""
        s, d = self.edges()
        return DirectedGraph.from_edges(self.num_nodes, d, s, self.out_w, self.labels)

    def label(self, i):
        return self.labels[i] if self.labels is not None else str(i)

    def label_list(self):
        return list(self.labels) if self.labels is not None else [str(i) for i in range(self.num_nodes)]


@dataclass(frozen=True)
class DegreeTable:
    raw_in: np.ndarray
    raw_out: np.ndarray

    @property
    def smoothed_in(self):
        return self.raw_in + 1

    @property
    def smoothed_out(self):
        return self.raw_out + 1

    @property
    def ratio(self):
        return self.smoothed_in / self.smoothed_out

    @property
    def sinks(self):
        return self.raw_out == 0

    @property
    def sources(self):
        return self.raw_in == 0


def degrees(g):
    return DegreeTable(np.asarray(g.raw_in, dtype=np.int64), np.asarray(g.raw_out, dtype=np.int64))


def in_out_ratio(g):
    return (g.raw_in + 1.0) / (g.raw_out + 1.0)


def _open_text(source):
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        return open(source, "rb"), True
    return source, False


def load_edge_list(source, delimiter=None, has_weights=False, dedupe=True, reverse=False):
    """Parse "src dst [weight]" lines. Labels are arbitrary strings, numbered by first appearance.

    ``source`` is a path or a binary/text stream. ``reverse`` flips every edge.
    """
    fh, close = _open_text(source)
    ids = {}
    src, dst, wts = [], [], []
    try:
        for lineno, raw in enumerate(fh, 1):
            line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(delimiter)
            want = 3 if has_weights else 2
            if len(parts) != want:
                raise EdgeListError(f"expected {want} fields, got {len(parts)}", lineno)
            a, b = parts[0].strip(), parts[1].strip()
            if not a or not b:
                raise EdgeListError("empty node label", lineno)
            if has_weights:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise EdgeListError(f"bad weight {parts[2]!r}", lineno) from None
                if not (w > 0) or not math.isfinite(w):
                    raise EdgeListError(f"weight must be positive, got {parts[2]!r}", lineno)
                wts.append(w)
            for lab in (a, b):
                if lab not in ids:
                    ids[lab] = len(ids)
            src.append(ids[a])
            dst.append(ids[b])
    finally:
        if close:
            fh.close()
    if reverse:
        src, dst = dst, src
    return DirectedGraph.from_edges(
        len(ids), src, dst, wts if has_weights else None, labels=list(ids), dedupe=dedupe
    )


def write_edge_list(g, dest):
    """Write "label<TAB>label[<TAB>weight]" lines in (src, dst) id order."""
    s, d = g.edges()
    labs = g.label_list()
    out = io.StringIO()
    if g.weighted:
        for u, v, w in zip(s, d, g.out_w):
            out.write(f"{labs[u]}\t{labs[v]}\t{w!r}\n")
    else:
        for u, v in zip(s, d):
            out.write(f"{labs[u]}\t{labs[v]}\n")
    _write(dest, out.getvalue())


def write_id_map(g, dest):
    labs = g.label_list()
    _write(dest, "".join(f"{lab}\t{i}\n" for i, lab in enumerate(labs)))


def _write(dest, text):
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def reciprocity_counts(g, subset=None):
    """Return (reciprocal_edges, total_edges); each mutual pair contributes 2 edges."""
    if subset is not None:
        g, _ = induced_subgraph(g, subset)
    s, d = g.edges()
    if len(s) == 0:
        return 0, 0
    n = g.num_nodes
    key = s * n + d
    rkey = d * n + s
    recip = int(np.isin(key, rkey, assume_unique=True).sum())
    return recip, len(s)


def induced_subgraph(g, nodes):
    """Subgraph on ``nodes``; returns (graph, old ids in new-id order).

    New ids follow ascending old id, so new id k is ``mapping[k]``.
    """
    keep = np.zeros(g.num_nodes, dtype=bool)
    nodes = np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes, dtype=np.int64)
    keep[nodes] = True
    mapping = np.flatnonzero(keep)
    new_id = np.full(g.num_nodes, -1, dtype=np.int64)
    new_id[mapping] = np.arange(len(mapping))
    s, d = g.edges()
    m = keep[s] & keep[d]
    w = g.out_w[m] if g.weighted else None
    labels = [g.labels[i] for i in mapping] if g.labels is not None else None
    sub = DirectedGraph.from_edges(len(mapping), new_id[s[m]], new_id[d[m]], w, labels)
    return sub, mapping


def scc_labels(g):
    """(number of SCCs, label per node)."""
    return kernels.scc_labels(g.num_nodes, g.out_ptr, g.out_idx)


def _largest_component(n_comp, labels):
    if n_comp == 0:
        return np.zeros(0, dtype=np.int64)
    sizes = np.bincount(labels, minlength=n_comp)
    best = sizes.max()
    cands = np.flatnonzero(sizes == best)
    if len(cands) == 1:
        return np.flatnonzero(labels == cands[0])
    # tie: smallest minimum member id; the first node carrying a candidate label wins
    is_cand = np.isin(labels, cands)
    first = labels[np.argmax(is_cand)]
    return np.flatnonzero(labels == first)


def max_strongly_connected_component(g):
    """(size, sorted member ids) of the largest SCC."""
    members = _largest_component(*scc_labels(g))
    return len(members), members


def estimate_avg_path_length(num_nodes=None, num_edges=None, g=None):
    """log|V| / log(2|E|/|V|); pass either a graph or the two counts."""
    if g is not None:
        num_nodes, num_edges = g.num_nodes, g.num_edges
    if num_nodes is None or num_edges is None:
        raise TypeError("need a graph or both num_nodes and num_edges")
    if num_nodes < 2 or num_edges < 1 or 2 * num_edges <= num_nodes:
        raise ValueError("path-length estimate undefined: requires |V| >= 2 and 2|E| > |V|")
    return math.log(num_nodes) / math.log(2.0 * num_edges / num_nodes)


def damping_from_apl(g):
    return 1.0 - 1.0 / estimate_avg_path_length(g=g)
