"""Exact rank over Q(i) and numerical rank helpers."""
from fractions import Fraction

import numpy as np

from .scalars import QI


def _field(c):
    if isinstance(c, QI):
        return QI(Fraction(c.re), Fraction(c.im))
    return Fraction(c)


def exact_rank(rows):
    """Rank of a matrix of exact scalars (lists of rows) by fraction-exact elimination."""
    m = [[_field(c) for c in row] for row in rows]
    if not m:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    for col in range(n_cols):
        piv = next((r for r in range(rank, n_rows) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        prow = m[rank]
        inv = 1 / prow[col]
        for r in range(rank + 1, n_rows):
            f = m[r][col]
            if f == 0:
                continue
            f = f * inv
            row = m[r]
            for c in range(col, n_cols):
                if prow[c] != 0:
                    row[c] = row[c] - f * prow[c]
        rank += 1
        if rank == n_rows:
            break
    return rank


def numerical_rank(a, rtol=1e-9):
    """Rank by singular values above ``rtol * max(1, largest singular value)``.

    Accepts a stack of matrices and returns an array of ranks.
    """
    a = np.asarray(a)
    if a.size == 0:
        return np.zeros(a.shape[:-2], dtype=int) if a.ndim > 2 else 0
    s = np.linalg.svd(a, compute_uv=False)
    scale = np.maximum(1.0, s[..., :1])
    return (s > rtol * scale).sum(axis=-1)
