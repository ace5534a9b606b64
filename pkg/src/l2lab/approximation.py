"""Finite-quotient approximation of kernel dimensions and L2-Betti numbers.

Two towers are supported: ``(Z/k)^n`` for Z^n and ``Z/2 wr Z/N`` (order
``N * 2**N``) for the lamplighter group.  Normalised kernel dimensions on
the quotients converge to the von Neumann dimension.
"""
import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .complexes import ChainComplex
from .group_ring import GroupRingElement
from .groups import FreeAbelianGroup
from .linalg import exact_rank, numerical_rank
from .matrix import GRMatrix
from .oracles import symbol

LAMPLIGHTER_MAX_LEVEL = 14
LAMPLIGHTER_EXACT_MAX = 8


class QuotientError(ValueError):
    pass


@dataclass(frozen=True)
class QuotientSpec:
    family: str
    level: int

    def __post_init__(self):
        if self.family not in ("free_abelian", "lamplighter"):
            raise QuotientError(f"no quotient tower for {self.family}")
        if self.level < 1:
            raise QuotientError("level must be >= 1")
        if self.family == "lamplighter" and self.level > LAMPLIGHTER_MAX_LEVEL:
            raise QuotientError(f"lamplighter level capped at {LAMPLIGHTER_MAX_LEVEL}")

    def index(self, rank=None):
        if self.family == "lamplighter":
            return self.level * 2 ** self.level
        return self.level ** rank


def _zn_ranks(A, k):
    """Ranks of ``A(zeta)`` over all ``zeta`` in the k-th roots of unity grid."""
    n = A.ctx.rank
    axis = 2 * np.pi * np.arange(k) / k
    pts = np.array(list(itertools.product(axis, repeat=n))) if n else np.zeros((1, 0))
    ranks = []
    for s in range(0, len(pts), 1 << 14):
        ranks.append(np.atleast_1d(numerical_rank(symbol(A, pts[s:s + (1 << 14)]))))
    return np.concatenate(ranks)


def _lamplighter_blocks(A, N):
    """Character blocks of ``x -> xA`` on the regular representation of ``Z/2 wr Z/N``.

    Left translation by lamps commutes with right multiplication, so the
    Walsh transform over lamp configurations splits the operator into
    ``2**N`` blocks of size ``(rows*N) x (cols*N)`` indexed by characters
    ``chi`` of ``(Z/2)^N``.  A term ``c*(D, s)`` of entry ``(i, j)`` maps
    ``(i, m)`` to ``(j, m + s)`` with weight ``c * chi(D + m)``.
    """
    terms = []
    for i in range(A.rows):
        for j in range(A.cols):
            for (lamps, shift), c in A.entries[i][j].terms.items():
                terms.append((i, j, lamps, shift, c))
    for chi in range(2 ** N):
        block = [[0] * (A.cols * N) for _ in range(A.rows * N)]
        for i, j, lamps, shift, c in terms:
            for m in range(N):
                parity = 0
                for x in lamps:
                    parity ^= (chi >> ((x + m) % N)) & 1
                r, col = i * N + m, j * N + (m + shift) % N
                block[r][col] = block[r][col] + (-c if parity else c)
        yield block


def quotient_kernel_dim(A, spec):
    """Normalised kernel dimension of ``A`` pushed to the finite quotient."""
    if isinstance(spec, int):
        spec = QuotientSpec(A.ctx.family, spec)
    if A.ctx.family != spec.family:
        raise QuotientError(f"quotient family {spec.family} does not match {A.ctx.family}")
    if spec.family == "free_abelian":
        ranks = _zn_ranks(A, spec.level)
        return Fraction(int((A.rows - ranks).sum()), len(ranks))
    N = spec.level
    total = 0
    if A.exact and N <= LAMPLIGHTER_EXACT_MAX:
        for block in _lamplighter_blocks(A, N):
            total += A.rows * N - exact_rank(block)
    else:
        blocks = np.array([np.array(b, dtype=complex) for b in _lamplighter_blocks(A, N)])
        total = int((A.rows * N - numerical_rank(blocks)).sum())
    return Fraction(total, spec.index())


def quotient_betti(A_or_C, spec):
    """Normalised quotient kernel dimension (matrix) or Betti numbers (complex)."""
    if isinstance(A_or_C, GRMatrix):
        return quotient_kernel_dim(A_or_C, spec)
    C = A_or_C
    if isinstance(spec, int):
        spec = QuotientSpec(C.ctx.family, spec)
    dims = [Fraction(C.ranks[0])] + [quotient_kernel_dim(d, spec) for d in C.differentials]
    out = []
    for p in range(C.top + 1):
        nxt = C.ranks[p + 1] if p + 1 <= C.top else 0
        out.append(dims[p] - (nxt - (dims[p + 1] if p + 1 <= C.top else 0)))
    return out


def tower(A_or_C, levels):
    """Convergence table ``[(level, value), ...]``."""
    return [(k, quotient_betti(A_or_C, k)) for k in levels]


def _hermite_rows(basis):
    """Upper triangular integer basis of the same lattice, and its index."""
    M = [[int(x) for x in row] for row in basis]
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("sublattice basis must be square")
    for col in range(n):
        while True:
            nz = [r for r in range(col, n) if M[r][col] != 0]
            if not nz:
                raise ValueError("sublattice basis is not of full rank")
            piv = min(nz, key=lambda r: abs(M[r][col]))
            M[col], M[piv] = M[piv], M[col]
            done = True
            for r in range(col + 1, n):
                q = M[r][col] // M[col][col]
                if q:
                    M[r] = [a - q * b for a, b in zip(M[r], M[col])]
                if M[r][col]:
                    done = False
            if done:
                break
        if M[col][col] < 0:
            M[col] = [-a for a in M[col]]
    index = 1
    for i in range(n):
        index *= M[i][i]
    return M, index


def _reduce(v, H):
    v = list(v)
    for i, row in enumerate(H):
        q = v[i] // row[i]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return tuple(v)


def restrict_index(A_or_C, basis):
    """Re-encode a matrix or complex over Z^n as one over the sublattice ``H``.

    ``basis`` rows span ``H`` (index ``d``); ``H`` is identified with Z^n
    through these coordinates.  Coset representatives form the box given by
    the Hermite normal form, listed in lexicographic order.  Shapes grow by
    the factor ``d`` and kernel dimensions multiply by exactly ``d``.
    """
    if isinstance(A_or_C, ChainComplex):
        C = A_or_C
        diffs = [restrict_index(d, basis) for d in C.differentials]
        H, d = _hermite_rows(basis)
        new_ctx = FreeAbelianGroup(C.ctx.rank)
        return ChainComplex(new_ctx, diffs, [n * d for n in C.ranks], C.exact)
    A = A_or_C
    if A.ctx.family != "free_abelian":
        raise ValueError("restriction is implemented for Z^n only")
    n = A.ctx.rank
    H, d = _hermite_rows(basis)
    reps = list(itertools.product(*[range(H[i][i]) for i in range(n)]))
    pos = {r: t for t, r in enumerate(reps)}
    Binv = [[Fraction(int(x.p), int(x.q)) for x in row]
            for row in sympy.Matrix(basis).T.inv().tolist()]
    new_ctx = FreeAbelianGroup(n)

    def coords(h):
        c = [sum(b * x for b, x in zip(row, h)) for row in Binv]
        if any(x.denominator != 1 for x in c):
            raise ArithmeticError("coset reduction left the sublattice")
        return tuple(int(x) for x in c)

    blocks = [[{} for _ in range(A.cols * d)] for _ in range(A.rows * d)]
    for i in range(A.rows):
        for j in range(A.cols):
            for g, c in A.entries[i][j].terms.items():
                for t, rep in enumerate(reps):
                    tg = tuple(a + b for a, b in zip(rep, g))
                    red = _reduce(tg, H)
                    h = coords(tuple(a - b for a, b in zip(tg, red)))
                    e = blocks[i * d + t][j * d + pos[red]]
                    e[h] = e.get(h, 0) + c
    entries = [[GroupRingElement(new_ctx, e, A.exact) for e in row] for row in blocks]
    return GRMatrix(new_ctx, entries, A.exact)
