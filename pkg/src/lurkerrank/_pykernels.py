"""Pure-Python/scipy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

BACKEND = "python"


class Gather:
    """y[i] = sum_k w[k] * x[idx[k]] over the CSR row of i."""

    def __init__(self, ptr, idx, w=None):
        n = len(ptr) - 1
        data = np.ones(len(idx)) if w is None else np.asarray(w, dtype=np.float64)
        self._mat = sp.csr_matrix((data, np.asarray(idx), np.asarray(ptr)), shape=(n, n))
        self.n = n

    def __call__(self, x, out=None, nthreads=1):
        y = self._mat @ np.asarray(x, dtype=np.float64)
        if out is None:
            return y
        out[:] = y
        return out


def count_inversions(seq):
    """Number of pairs i < j with seq[i] > seq[j] (bottom-up merge sort)."""
    a = [int(v) for v in seq]
    n = len(a)
    buf = [0] * n
    inv = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if a[j] < a[i]:
                    buf[k] = a[j]
                    inv += mid - i
                    j += 1
                else:
                    buf[k] = a[i]
                    i += 1
                k += 1
            buf[k:hi] = a[i:mid] + a[j:hi]
        a, buf = buf, a
        width *= 2
    return inv


def scc_labels(n, ptr, idx):
    if n == 0:
        return 0, np.zeros(0, dtype=np.int64)
    mat = sp.csr_matrix((np.ones(len(idx)), np.asarray(idx), np.asarray(ptr)), shape=(n, n))
    ncomp, labels = connected_components(mat, directed=True, connection="strong")
    return int(ncomp), labels.astype(np.int64)


def common_neighbors(out_ptr, out_idx, in_ptr, in_idx, src, dst, nthreads=1):
    """|R_s ∩ B_t| for every (s, t) pair, read off the sparse square of the adjacency."""
    n = len(out_ptr) - 1
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    if len(src) == 0:
        return np.zeros(0, dtype=np.int64)
    a = sp.csr_matrix((np.ones(len(out_idx)), np.asarray(out_idx), np.asarray(out_ptr)), shape=(n, n))
    a2 = (a @ a).tocsr()
    return np.asarray(a2[src, dst]).ravel().astype(np.int64)
