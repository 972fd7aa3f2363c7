"""Dense GF(2) linear algebra on numpy uint8 arrays."""

from __future__ import annotations

import numpy as np


def rank(M: np.ndarray) -> int:
    """GF(2) rank via Gaussian elimination with XOR row operations."""
    R = (np.asarray(M, dtype=np.uint8) % 2).copy()
    m, n = R.shape
    r = 0
    for col in range(n):
        piv = None
        for row in range(r, m):
            if R[row, col]:
                piv = row
                break
        if piv is None:
            continue
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        for row in range(m):
            if row != r and R[row, col]:
                R[row] ^= R[r]
        r += 1
        if r == m:
            break
    return r


def nullity(M: np.ndarray) -> int:
    M = np.asarray(M, dtype=np.uint8)
    return M.shape[1] - rank(M)
