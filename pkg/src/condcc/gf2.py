"""Dense linear algebra over GF(2) on small numpy uint8 matrices."""

from __future__ import annotations

import numpy as np


def as_matrix(rows) -> np.ndarray:
    m = np.array(rows, dtype=np.uint8) % 2
    if m.ndim == 1:
        m = m.reshape(1, -1)
    return m


def rref(mat, col_order=None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns).

    col_order optionally gives the order in which columns are considered
    for pivoting (used to push support onto preferred coordinates).
    """
    m = as_matrix(mat).copy()
    rows, cols = m.shape
    if col_order is None:
        col_order = range(cols)
    pivots: list[int] = []
    r = 0
    for c in col_order:
        if r >= rows:
            break
        hit = np.nonzero(m[r:, c])[0]
        if hit.size == 0:
            continue
        piv = r + hit[0]
        m[[r, piv]] = m[[piv, r]]
        others = np.nonzero(m[:, c])[0]
        for o in others:
            if o != r:
                m[o] ^= m[r]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(mat) -> int:
    return rref(mat)[0].shape[0]


def in_rowspace(mat, v) -> bool:
    m = as_matrix(mat)
    v = as_matrix(v)
    return rank(m) == rank(np.vstack([m, v]))


def solve(A, b):
    """One solution x of x A = b over GF(2) (row-vector convention), or None.

    A is (rows x cols); x weights the rows of A to produce b.
    """
    A = as_matrix(A)
    b = as_matrix(b).ravel()
    rows, cols = A.shape
    # augment with identity to track row operations
    aug = np.hstack([A, np.eye(rows, dtype=np.uint8)])
    red, pivots = rref(aug, col_order=range(cols))
    x = np.zeros(rows, dtype=np.uint8)
    resid = b.copy()
    for i, c in enumerate(pivots):
        if c >= cols:
            continue
        if resid[c]:
            resid ^= red[i, :cols]
            x ^= red[i, cols:]
    if resid.any():
        return None
    return x


def null_space(A) -> np.ndarray:
    """Basis (rows) of {x : A x = 0} over GF(2)."""
    A = as_matrix(A)
    rows, cols = A.shape
    red, pivots = rref(A)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        x = np.zeros(cols, dtype=np.uint8)
        x[f] = 1
        for i, p in enumerate(pivots):
            if red[i, f]:
                x[p] = 1
        basis.append(x)
    if not basis:
        return np.zeros((0, cols), dtype=np.uint8)
    return np.array(basis, dtype=np.uint8)
