"""Standard matrices and chain complexes used by tests, demos and the CLI samples."""
import random
from fractions import Fraction

from .complexes import ChainComplex
from .group_ring import GroupRingElement
from .groups import FreeAbelianGroup, FreeGroup, LamplighterGroup
from .matrix import GRMatrix


def laurent(ctx, coeffs, exact=True):
    """Element of C[Z^n] from ``{exponent: coeff}``; ints are accepted for rank 1."""
    terms = {}
    for e, c in coeffs.items():
        g = (e,) if isinstance(e, int) else tuple(e)
        terms[g] = Fraction(c) if exact else complex(c) if isinstance(c, complex) else float(c)
    return GroupRingElement(ctx, terms, exact=exact)


def zpoly(coeffs, low=0, exact=True):
    """1x1 matrix ``sum_k coeffs[k] z^(low+k)`` over Z."""
    Z = FreeAbelianGroup(1)
    return GRMatrix(Z, [[laurent(Z, {low + k: c for k, c in enumerate(coeffs) if c}, exact)]], exact)


def lamplighter_markov(exact=True):
    """``u = 1/4 (e0 t + t + (e0 t)^-1 + t^-1)``; dim ker r_u = 1/3."""
    G = LamplighterGroup()
    q = Fraction(1, 4) if exact else 0.25
    u = GroupRingElement(G, {g: q for g in G.markov_support()}, exact=exact)
    return GRMatrix(G, [[u]], exact)


def circle_complex(exact=True):
    """Universal cover of S^1: ``Z[Z] --(z-1)--> Z[Z]``."""
    A = zpoly([-1, 1], exact=exact)
    return ChainComplex(A.ctx, [A], [1, 1], exact)


def scaled_circle_complex(a=2, exact=True):
    """``C_1 --(z-a)--> C_0``; L2-acyclic with torsion ``ln max(1, |a|)``."""
    A = zpoly([-a, 1], exact=exact)
    return ChainComplex(A.ctx, [A], [1, 1], exact)


def torus_complex(exact=True):
    """Cellular complex of the universal cover of the 2-torus over Z^2."""
    Z2 = FreeAbelianGroup(2)
    x1 = laurent(Z2, {(1, 0): 1, (0, 0): -1}, exact)
    y1 = laurent(Z2, {(0, 1): 1, (0, 0): -1}, exact)
    c1 = GRMatrix(Z2, [[x1], [y1]], exact)
    c2 = GRMatrix(Z2, [[-y1, x1]], exact)
    return ChainComplex(Z2, [c1, c2], [1, 2, 1], exact)


def wedge_of_circles(k=2, exact=True):
    """Universal cover of a wedge of ``k`` circles over the free group of rank ``k``."""
    F = FreeGroup(k)
    rows = []
    for i in range(k):
        rows.append([GroupRingElement(F, {F.gen(i): 1, (): -1}, exact=exact)])
    return ChainComplex(F, [GRMatrix(F, rows, exact)], [1, k], exact)


def koszul_complex(f, g):
    """``C_2 --[g, -f]--> C_1^2 --[f; g]--> C_0`` over a commutative group ring."""
    ctx = f.ctx
    c1 = GRMatrix(ctx, [[f], [g]], f.exact)
    c2 = GRMatrix(ctx, [[g, -f]], f.exact)
    return ChainComplex(ctx, [c1, c2], [1, 2, 1], f.exact)


def random_laurent(ctx, rng, max_terms=3, radius=2, max_coeff=3):
    """Random non-zero integer Laurent polynomial with at most ``max_terms`` terms."""
    n = ctx.rank
    terms = {}
    while not terms:
        for _ in range(rng.randint(1, max_terms)):
            g = tuple(rng.randint(-radius, radius) for _ in range(n))
            c = rng.choice([x for x in range(-max_coeff, max_coeff + 1) if x])
            terms[g] = terms.get(g, 0) + c
        terms = {g: Fraction(c) for g, c in terms.items() if c}
    return GroupRingElement(ctx, terms)


def _block(ctx, blocks, rows, cols):
    """Assemble a block-diagonal matrix from ``(row_off, col_off, GRMatrix)`` pieces."""
    zero = GroupRingElement.zero(ctx)
    out = [[zero] * cols for _ in range(rows)]
    for r0, c0, M in blocks:
        for i in range(M.rows):
            for j in range(M.cols):
                out[r0 + i][c0 + j] = M.entries[i][j]
    return GRMatrix(ctx, out, True)


def random_complex(seed, rank=None):
    """Random length-2 complex over Z or Z^2 with ranks <= 4.

    A Koszul piece ``(1, 2, 1)`` is summed with optional one-map pieces in
    degrees 1 and 2, each a random matrix with entry supports <= 3.
    """
    rng = random.Random(seed)
    n = rank or rng.choice([1, 2])
    ctx = FreeAbelianGroup(n)
    k = koszul_complex(random_laurent(ctx, rng), random_laurent(ctx, rng))
    a0, a1 = rng.randint(0, 2), rng.randint(0, 1)  # degree-1 piece: a1 x a0
    b1, b2 = rng.randint(0, 1), rng.randint(0, 2)  # degree-2 piece: b2 x b1
    if a0 == 0 or a1 == 0:
        a0 = a1 = 0
    if b1 == 0 or b2 == 0:
        b1 = b2 = 0
    ranks = [1 + a0, 2 + a1 + b1, 1 + b2]

    def rand_mat(r, c):
        return GRMatrix(ctx, [[random_laurent(ctx, rng) if rng.random() < 0.8
                               else GroupRingElement.zero(ctx) for _ in range(c)]
                              for _ in range(r)], True)

    pieces1 = [(0, 0, k.differentials[0])]
    if a0:
        pieces1.append((2, 1, rand_mat(a1, a0)))
    pieces2 = [(0, 0, k.differentials[1])]
    if b1:
        pieces2.append((1, 2 + a1, rand_mat(b2, b1)))
    c1 = _block(ctx, pieces1, ranks[1], ranks[0])
    c2 = _block(ctx, pieces2, ranks[2], ranks[1])
    return ChainComplex(ctx, [c1, c2], ranks, True)


def random_zpoly_matrix(seed, shape=(1, 1), degree=3, max_coeff=3):
    """Random integer polynomial matrix over Z with entries of degree <= ``degree``."""
    rng = random.Random(seed)
    Z = FreeAbelianGroup(1)
    rows = []
    for _ in range(shape[0]):
        row = []
        for _ in range(shape[1]):
            coeffs = {}
            while not coeffs:
                coeffs = {k: rng.randint(-max_coeff, max_coeff) for k in range(degree + 1)}
                coeffs = {k: c for k, c in coeffs.items() if c}
            row.append(laurent(Z, coeffs))
        rows.append(row)
    return GRMatrix(Z, rows, True)
