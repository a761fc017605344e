# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: CSR gathers, inversion counting, Tarjan SCC, edge overlaps.

Every function here has a drop-in twin in ``_pykernels``; ``_core`` picks one at import.
"""
import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.stdint cimport int32_t, int64_t

cnp.import_array()

BACKEND = "cython"


cdef void _gather(const int64_t[::1] ptr, const int32_t[::1] idx, const double[::1] w,
                  const double[::1] x, double[::1] out, int nthreads) noexcept nogil:
    cdef Py_ssize_t n = ptr.shape[0] - 1
    cdef Py_ssize_t i
    cdef int64_t k
    cdef double s
    cdef bint weighted = w.shape[0] > 0
    if weighted:
        for i in prange(n, num_threads=nthreads, schedule="static"):
            s = 0.0
            for k in range(ptr[i], ptr[i + 1]):
                s = s + w[k] * x[idx[k]]
            out[i] = s
    else:
        for i in prange(n, num_threads=nthreads, schedule="static"):
            s = 0.0
            for k in range(ptr[i], ptr[i + 1]):
                s = s + x[idx[k]]
            out[i] = s


class Gather:
    """y[i] = sum_k w[k] * x[idx[k]] over the CSR row of i."""

    def __init__(self, ptr, idx, w=None):
        self.ptr = np.ascontiguousarray(ptr, dtype=np.int64)
        self.idx = np.ascontiguousarray(idx, dtype=np.int32)
        self.w = np.empty(0) if w is None else np.ascontiguousarray(w, dtype=np.float64)
        self.n = self.ptr.shape[0] - 1

    def __call__(self, x, out=None, int nthreads=1):
        x = np.ascontiguousarray(x, dtype=np.float64)
        if out is None:
            out = np.empty(self.n, dtype=np.float64)
        _gather(self.ptr, self.idx, self.w, x, out, max(nthreads, 1))
        return out


cdef int64_t _merge_count(int64_t[::1] a, int64_t[::1] buf, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t width = 1, lo, mid, hi, i, j, k
    cdef int64_t inv = 0
    cdef int64_t[::1] src = a
    cdef int64_t[::1] dst = buf
    cdef int64_t[::1] tmp
    while width < n:
        lo = 0
        while lo < n:
            mid = lo + width
            if mid > n:
                mid = n
            hi = lo + 2 * width
            if hi > n:
                hi = n
            i = lo
            j = mid
            k = lo
            while i < mid and j < hi:
                if src[j] < src[i]:
                    dst[k] = src[j]
                    inv += mid - i
                    j += 1
                else:
                    dst[k] = src[i]
                    i += 1
                k += 1
            while i < mid:
                dst[k] = src[i]
                i += 1
                k += 1
            while j < hi:
                dst[k] = src[j]
                j += 1
                k += 1
            lo = hi
        tmp = src
        src = dst
        dst = tmp
        width *= 2
    return inv


def count_inversions(seq):
    """Number of pairs i < j with seq[i] > seq[j]."""
    cdef int64_t[::1] a = np.array(seq, dtype=np.int64, copy=True)
    cdef int64_t[::1] buf = np.empty_like(a)
    cdef Py_ssize_t n = a.shape[0]
    cdef int64_t inv
    with nogil:
        inv = _merge_count(a, buf, n)
    return int(inv)


def scc_labels(Py_ssize_t n, ptr, idx):
    """Iterative Tarjan. Returns (number of components, component label per node)."""
    cdef const int64_t[::1] p = np.ascontiguousarray(ptr, dtype=np.int64)
    cdef const int32_t[::1] e = np.ascontiguousarray(idx, dtype=np.int32)
    labels_arr = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] labels = labels_arr
    cdef int64_t[::1] index = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] low = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] stack = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] cs_node = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] cs_edge = np.empty(n, dtype=np.int64)
    cdef char[::1] onstack = np.zeros(n, dtype=np.int8)
    cdef Py_ssize_t root, top, sp = 0
    cdef int64_t counter = 0, ncomp = 0, v, w, u, ed
    with nogil:
        for root in range(n):
            if index[root] != -1:
                continue
            top = 0
            cs_node[0] = root
            cs_edge[0] = p[root]
            index[root] = counter
            low[root] = counter
            counter += 1
            stack[sp] = root
            sp += 1
            onstack[root] = 1
            while top >= 0:
                v = cs_node[top]
                ed = cs_edge[top]
                if ed < p[v + 1]:
                    cs_edge[top] = ed + 1
                    w = e[ed]
                    if index[w] == -1:
                        top += 1
                        cs_node[top] = w
                        cs_edge[top] = p[w]
                        index[w] = counter
                        low[w] = counter
                        counter += 1
                        stack[sp] = w
                        sp += 1
                        onstack[w] = 1
                    elif onstack[w] and index[w] < low[v]:
                        low[v] = index[w]
                else:
                    if low[v] == index[v]:
                        while True:
                            sp -= 1
                            u = stack[sp]
                            onstack[u] = 0
                            labels[u] = ncomp
                            if u == v:
                                break
                        ncomp += 1
                    top -= 1
                    if top >= 0:
                        u = cs_node[top]
                        if low[v] < low[u]:
                            low[u] = low[v]
    return int(ncomp), labels_arr


cdef inline int64_t _search_count(const int32_t[::1] small, int64_t a, int64_t a_end,
                                  const int32_t[::1] big, int64_t b, int64_t b_end) noexcept nogil:
    # each item of the short sorted run is located in the long one by bisection
    cdef int64_t c = 0, lo, hi, mid
    cdef int32_t v
    while a < a_end and b < b_end:
        v = small[a]
        lo = b
        hi = b_end
        while lo < hi:
            mid = (lo + hi) >> 1
            if big[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        if lo < b_end and big[lo] == v:
            c = c + 1
            lo = lo + 1
        b = lo
        a = a + 1
    return c


def common_neighbors(out_ptr, out_idx, in_ptr, in_idx, src, dst, int nthreads=1):
    """|R_s ∩ B_t| for every (s, t) pair: sorted-list merge, or bisection when one list is much longer."""
    cdef const int64_t[::1] op = np.ascontiguousarray(out_ptr, dtype=np.int64)
    cdef const int32_t[::1] oi = np.ascontiguousarray(out_idx, dtype=np.int32)
    cdef const int64_t[::1] ip = np.ascontiguousarray(in_ptr, dtype=np.int64)
    cdef const int32_t[::1] ii = np.ascontiguousarray(in_idx, dtype=np.int32)
    cdef const int64_t[::1] s = np.ascontiguousarray(src, dtype=np.int64)
    cdef const int64_t[::1] t = np.ascontiguousarray(dst, dtype=np.int64)
    cdef Py_ssize_t m = s.shape[0], q
    res = np.zeros(m, dtype=np.int64)
    cdef int64_t[::1] r = res
    cdef int64_t a, a_end, b, b_end, c
    for q in prange(m, nogil=True, num_threads=max(nthreads, 1), schedule="dynamic"):
        a = op[s[q]]
        a_end = op[s[q] + 1]
        b = ip[t[q]]
        b_end = ip[t[q] + 1]
        if 16 * (a_end - a) < b_end - b:
            r[q] = _search_count(oi, a, a_end, ii, b, b_end)
            continue
        if 16 * (b_end - b) < a_end - a:
            r[q] = _search_count(ii, b, b_end, oi, a, a_end)
            continue
        c = 0
        while a < a_end and b < b_end:
            if oi[a] == ii[b]:
                c = c + 1
                a = a + 1
                b = b + 1
            elif oi[a] < ii[b]:
                a = a + 1
            else:
                b = b + 1
        r[q] = c
    return res
