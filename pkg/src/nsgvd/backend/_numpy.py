"""Pure-numpy implementation of the hot kernels.

Squared distances are accumulated by direct summation over the feature axis
(never the ||a||^2 + ||b||^2 - 2<a,b> expansion, which loses precision for
nearby points). Row blocks bound the size of the broadcast temporary.
"""

import numpy as np

# cap on elements of the (block, m, k) difference temporary (~64 MB of f64)
_BLOCK_ELEMS = 1 << 23


def pairwise_sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared euclidean distances between rows of `a` (n,k) and `b` (m,k)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    n, k = a.shape
    m = b.shape[0]
    out = np.empty((n, m), dtype=np.float64)
    step = max(1, _BLOCK_ELEMS // max(1, m * k))
    for i0 in range(0, n, step):
        d = a[i0 : i0 + step, None, :] - b[None, :, :]
        out[i0 : i0 + step] = (d * d).sum(axis=-1)
    return out


def pairwise_sqdist_self(a: np.ndarray) -> np.ndarray:
    """Symmetric variant with an exactly-zero diagonal and exact symmetry."""
    full = pairwise_sqdist(a, a)
    upper = np.triu(full, k=1)
    return upper + upper.T
