"""Dense matrices over a group ring.

An ``m x n`` matrix ``A`` acts on row vectors by right multiplication,
``x -> x A``, giving ``r_A : N(G)^m -> N(G)^n``.  Kernel dimensions are
therefore subsets of the ``m``-dimensional domain and the characteristic
sequence lives on the ``m x m`` matrix ``A A*``.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

from .group_ring import GroupRingElement, involute, multiply, one_norm, one_norm_upper, trace_cg


class ShapeError(ValueError):
    pass


class GRMatrix:
    __slots__ = ("ctx", "rows", "cols", "entries", "exact")

    def __init__(self, ctx, entries, exact=None):
        entries = [list(row) for row in entries]
        if not entries or not entries[0]:
            raise ShapeError("matrices must have at least one row and column")
        cols = len(entries[0])
        if any(len(row) != cols for row in entries):
            raise ShapeError("ragged matrix rows")
        if exact is None:
            exact = next((e.exact for row in entries for e in row
                          if isinstance(e, GroupRingElement)), True)
        for row in entries:
            for j, e in enumerate(row):
                if not isinstance(e, GroupRingElement):
                    row[j] = GroupRingElement.one(ctx, exact) * e
                elif e.ctx != ctx:
                    raise ValueError("entry group context differs from matrix context")
                elif e.exact != exact:
                    raise ValueError("entries mix exact and float modes")
        self.ctx = ctx
        self.entries = entries
        self.rows = len(entries)
        self.cols = cols
        self.exact = exact

    @classmethod
    def identity(cls, ctx, n, exact=True):
        one = GroupRingElement.one(ctx, exact)
        zero = GroupRingElement.zero(ctx, exact)
        return cls(ctx, [[one if i == j else zero for j in range(n)] for i in range(n)], exact)

    @classmethod
    def zeros(cls, ctx, m, n, exact=True):
        zero = GroupRingElement.zero(ctx, exact)
        return cls(ctx, [[zero] * n for _ in range(m)], exact)

    @classmethod
    def scalar(cls, u):
        """The 1x1 matrix with entry ``u``."""
        return cls(u.ctx, [[u]], u.exact)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other):
        return mat_multiply(self, other)

    def __mul__(self, other):
        if isinstance(other, GRMatrix):
            return mat_multiply(self, other)
        return GRMatrix(self.ctx, [[e * other for e in row] for row in self.entries], self.exact)

    def __rmul__(self, other):
        return GRMatrix(self.ctx, [[other * e for e in row] for row in self.entries], self.exact)

    def __add__(self, other):
        self._same(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        return GRMatrix(self.ctx, [[a + b for a, b in zip(r, s)]
                                   for r, s in zip(self.entries, other.entries)], self.exact)

    def __neg__(self):
        return GRMatrix(self.ctx, [[-e for e in row] for row in self.entries], self.exact)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return (isinstance(other, GRMatrix) and self.ctx == other.ctx
                and self.shape == other.shape and self.entries == other.entries)

    def is_zero(self):
        return not any(e.terms for row in self.entries for e in row)

    def _same(self, other):
        if self.ctx != other.ctx:
            raise ValueError("group context mismatch")
        if self.exact != other.exact:
            raise ValueError("cannot combine exact and float matrices")

    def adjoint(self):
        return adjoint(self)

    star = adjoint

    def trace(self):
        return mat_trace(self)

    def to_float(self):
        return GRMatrix(self.ctx, [[e.to_float() for e in row] for row in self.entries], False)

    def to_exact(self):
        return GRMatrix(self.ctx, [[e.to_exact() for e in row] for row in self.entries], True)

    def transpose(self):
        return GRMatrix(self.ctx, [list(col) for col in zip(*self.entries)], self.exact)

    def __repr__(self):
        return f"GRMatrix({self.rows}x{self.cols} over {self.ctx!r})"


def mat_multiply(A, B):
    A._same(B)
    if A.cols != B.rows:
        raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
    zero = GroupRingElement.zero(A.ctx, A.exact)
    out = []
    for i in range(A.rows):
        row = []
        for j in range(B.cols):
            acc = zero
            for k in range(A.cols):
                a, b = A.entries[i][k], B.entries[k][j]
                if a.terms and b.terms:
                    acc = acc + multiply(a, b)
            row.append(acc)
        out.append(row)
    return GRMatrix(A.ctx, out, A.exact)


def adjoint(A):
    """Transpose and apply the involution entrywise."""
    return GRMatrix(A.ctx, [[involute(A.entries[j][i]) for j in range(A.rows)]
                            for i in range(A.cols)], A.exact)


def mat_trace(A):
    if A.rows != A.cols:
        raise ShapeError(f"trace of a non-square {A.shape} matrix")
    return sum((trace_cg(A.entries[i][i]) for i in range(A.rows)), 0 if A.exact else 0.0)


def direct_sum(A, B):
    A._same(B)
    zero = GroupRingElement.zero(A.ctx, A.exact)
    top = [row + [zero] * B.cols for row in A.entries]
    bottom = [[zero] * A.cols + row for row in B.entries]
    return GRMatrix(A.ctx, top + bottom, A.exact)


@dataclass(frozen=True)
class KBound:
    """A number ``K`` with ``K**2 = k_squared >= ||r_A||**2``.

    ``user_asserted`` marks a value supplied by the caller rather than
    derived from the l1 bound; correctness then rests on the caller.
    """

    k_squared: object
    user_asserted: bool = False

    def __post_init__(self):
        if not self.k_squared > 0:
            raise ValueError("k_squared must be positive")

    @property
    def K(self):
        return math.sqrt(self.k_squared)

    @property
    def log_K(self):
        return 0.5 * math.log(self.k_squared)

    @classmethod
    def user(cls, k_squared):
        if isinstance(k_squared, (int, str)):
            k_squared = Fraction(k_squared)
        return cls(k_squared, user_asserted=True)


def k_bound(A):
    """``k_squared = (2 cols - 1) * rows * (max entry l1 norm)**2``.

    Exact (a Fraction) for exact input.  A zero matrix gets ``k_squared = 1``
    since every positive K is admissible for it.
    """
    if A.exact:
        mx = max(one_norm_upper(e) for row in A.entries for e in row)
    else:
        mx = max(one_norm(e) for row in A.entries for e in row)
    if mx == 0:
        return KBound(Fraction(1) if A.exact else 1.0)
    return KBound((2 * A.cols - 1) * A.rows * mx * mx)
