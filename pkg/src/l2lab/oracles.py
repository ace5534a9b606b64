"""Closed-form ground truth used to check the combinatorial estimators.

Finite groups go through the regular representation; Z^n goes through the
Fourier symbol ``A(z)`` on the torus; over Z determinants reduce to Mahler
measures of Laurent polynomials.
"""
import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .estimators import NSValue
from .group_ring import GroupRingElement, multiply
from .linalg import exact_rank, numerical_rank
from .matrix import adjoint, mat_multiply
from .scalars import QI


class OracleError(ValueError):
    pass


class NumericalInstabilityError(OracleError):
    pass


def _require(A, family):
    if A.ctx.family != family:
        raise OracleError(f"this oracle needs a {family} group, got {A.ctx.family}")


# -- finite groups -----------------------------------------------------------

def regular_representation(A, exact=None):
    """Matrix of ``x -> x A`` on ``C[G]^m`` in the basis of group elements.

    Rows are indexed by ``(i, g)``, columns by ``(j, g')``, row-major over the
    element indices of the finite group.
    """
    _require(A, "finite")
    G = A.ctx
    n = G.order
    exact = A.exact if exact is None else exact
    if exact:
        R = [[0] * (A.cols * n) for _ in range(A.rows * n)]
    else:
        R = np.zeros((A.rows * n, A.cols * n), dtype=complex)
    for i in range(A.rows):
        for j in range(A.cols):
            for h, c in A.entries[i][j].terms.items():
                for g in range(n):
                    r, s = i * n + g, j * n + G.table[g][h]
                    if exact:
                        R[r][s] = R[r][s] + c
                    else:
                        R[r, s] += complex(c)
    return R


def finite_kernel_dim(A):
    """``dim_C ker(x -> xA) / |G|`` as a Fraction."""
    _require(A, "finite")
    n = A.ctx.order
    if A.exact:
        rank = exact_rank(regular_representation(A))
    else:
        rank = int(numerical_rank(regular_representation(A)))
    return Fraction(A.rows * n - rank, n)


def _finite_gram_eigenvalues(A):
    R = regular_representation(A, exact=False)
    return np.linalg.eigvalsh(R @ R.conj().T)


def finite_fk_det(A):
    """Fuglede-Kadison determinant over a finite group.

    Product of the non-zero eigenvalues of ``AA*`` in the regular
    representation raised to ``1/(2|G|)``; the zero map has determinant 1.
    """
    _require(A, "finite")
    ev = _finite_gram_eigenvalues(A)
    tol = 1e-9 * max(1.0, float(ev.max(initial=0.0)))
    pos = ev[ev > tol]
    return math.exp(float(np.log(pos).sum()) / (2 * A.ctx.order))


def finite_spectral_density(A, lambdas):
    _require(A, "finite")
    ev = np.clip(_finite_gram_eigenvalues(A), 0, None)
    lam = np.asarray(lambdas, dtype=float)
    tol = 1e-9 * max(1.0, float(ev.max(initial=0.0)))
    counts = [(ev <= l * l + tol).sum() for l in lam]
    return SpectralDensitySample(list(map(float, lam)), [c / A.ctx.order for c in counts])


def finite_novikov_shubin():
    """Every map over a finite group has a spectral gap at zero."""
    return NSValue.infinity_plus()


# -- Z^n: symbols on the torus -----------------------------------------------

def symbol(A, thetas):
    """``A(z)`` at torus points ``z = exp(i*theta)``; ``thetas`` has shape (N, n)."""
    _require(A, "free_abelian")
    th = np.asarray(thetas, dtype=float).reshape(-1, A.ctx.rank)
    out = np.zeros((th.shape[0], A.rows, A.cols), dtype=complex)
    for i in range(A.rows):
        for j in range(A.cols):
            for g, c in A.entries[i][j].terms.items():
                out[:, i, j] += complex(c) * np.exp(1j * (th @ np.asarray(g, dtype=float)))
    return out


def torus_grid(rank, k, offset=0.0):
    n = 2 ** k
    axis = 2 * np.pi * (np.arange(n) + offset) / n
    if rank == 0:
        return np.zeros((1, 0))
    mesh = np.meshgrid(*([axis] * rank), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def default_grid_exponent(rank):
    return {0: 0, 1: 12, 2: 8}.get(rank, 5)


@dataclass
class SpectralDensitySample:
    lambdas: list
    values: list
    grid_exponent: int = None
    grid_discrepancy: float = None

    def to_dict(self):
        return {"lambdas": self.lambdas, "values": self.values,
                "grid_exponent": self.grid_exponent, "grid_discrepancy": self.grid_discrepancy}


def _density_on_grid(A, lam, k, chunk=1 << 15):
    th = torus_grid(A.ctx.rank, k)
    counts = np.zeros(len(lam))
    for s in range(0, len(th), chunk):
        S = symbol(A, th[s:s + chunk])
        ev = np.linalg.eigvalsh(S @ np.conj(np.transpose(S, (0, 2, 1))))
        ev = np.clip(ev, 0, None)
        for t, l in enumerate(lam):
            counts[t] += (ev <= l * l * (1 + 1e-12) + 1e-300).sum()
    return counts / len(th)


def torus_spectral_density(A, lambdas, grid_exponent=None):
    """``F(lambda)`` = torus average of #{singular values of A(z) <= lambda}.

    Singular values are counted on the ``rows``-dimensional domain (zero
    eigenvalues of ``A(z)A(z)*`` included), so ``F`` runs from the kernel
    dimension up to ``rows``.
    """
    _require(A, "free_abelian")
    k = default_grid_exponent(A.ctx.rank) if grid_exponent is None else grid_exponent
    if A.ctx.rank and k < 8:
        warnings.warn(f"torus grid 2^{k} per dimension is below 2^8")
    lam = np.asarray(lambdas, dtype=float)
    order = np.argsort(lam)
    lam = lam[order]
    vals = _density_on_grid(A, lam, k)
    disc = None
    if A.ctx.rank and (k + 1) * A.ctx.rank <= 24:
        disc = float(np.max(np.abs(_density_on_grid(A, lam, k + 1) - vals)))
    return SpectralDensitySample(list(map(float, lam)), list(map(float, vals)), k, disc)


def torus_kernel_dim(A, samples=8, seed=0, rtol=1e-9):
    """``rows - generic rank of A(z)``, the rank taken at random torus points."""
    _require(A, "free_abelian")
    if A.ctx.rank == 0:
        ranks = numerical_rank(symbol(A, np.zeros((1, 0))), rtol)
    else:
        rng = np.random.default_rng(seed)
        ranks = numerical_rank(symbol(A, rng.uniform(0, 2 * np.pi, (samples, A.ctx.rank))), rtol)
    ranks = np.atleast_1d(ranks)
    if ranks.min() != ranks.max():
        raise NumericalInstabilityError(f"symbol rank varies across sample points: {ranks.tolist()}")
    return Fraction(A.rows - int(ranks[0]))


def torus_novikov_shubin(A, lambdas=None, grid_exponent=None):
    """Novikov-Shubin exponent of ``F(lambda) - F(0)`` near zero.

    ``inf+`` when ``F`` is flat on the sampled window (a spectral gap).
    Returns ``(NSValue, fit residual)``.
    """
    _require(A, "free_abelian")
    if lambdas is None:
        lambdas = np.geomspace(1e-2, 1e-1, 12)
    if grid_exponent is None:
        grid_exponent = 16 if A.ctx.rank == 1 else default_grid_exponent(A.ctx.rank) + 2
    base = float(torus_kernel_dim(A))
    dens = torus_spectral_density(A, lambdas, grid_exponent)
    excess = np.array(dens.values) - base
    if excess[0] <= 0:
        return NSValue.infinity_plus(), 0.0
    x, y = np.log(dens.lambdas), np.log(excess)
    coef, resid, *_ = np.polyfit(x, y, 1, full=True)
    return NSValue(max(0.0, float(coef[0]))), float(np.sqrt(resid[0] / len(x))) if len(resid) else 0.0


# -- Z: Laurent polynomials and Mahler measure -------------------------------

def laurent_coefficients(p):
    """``(low, coeffs)`` with ``p = sum_k coeffs[k] z^(low + k)``; p over Z."""
    if p.ctx.family != "free_abelian" or p.ctx.rank != 1:
        raise OracleError("Laurent polynomials need the group Z")
    if not p.terms:
        return 0, []
    exps = [g[0] for g in p.terms]
    low, high = min(exps), max(exps)
    coeffs = [0] * (high - low + 1)
    for g, c in p.terms.items():
        coeffs[g[0] - low] = c
    return low, coeffs


def _as_rational(c):
    """Exact rational value of ``c`` or None; real floats with small binary denominators count."""
    if isinstance(c, (QI, complex)):
        return None
    if isinstance(c, float):
        if not math.isfinite(c):
            return None
        q = Fraction(c)
        return q if q.denominator <= 1 << 20 else None
    return Fraction(c)


def _is_rational_poly(coeffs):
    return all(_as_rational(c) is not None for c in coeffs)


def _log_measure_roots(coeffs):
    """``ln|lead| + sum_{|a|>1} ln|a|`` for ascending coefficients."""
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
    if _is_rational_poly(coeffs):
        z = sympy.Symbol("z")
        qs = [_as_rational(c) for c in reversed(coeffs)]
        poly = sympy.Poly([sympy.Rational(q.numerator, q.denominator) for q in qs], z)
        lead, factors = poly.factor_list()
        total = math.log(abs(float(lead)))
        for f, mult in factors:
            total += mult * _log_measure_roots_float([float(c) for c in reversed(f.all_coeffs())])
        return total
    return _log_measure_roots_float([complex(c) for c in coeffs])


def _log_measure_roots_float(coeffs):
    desc = np.array(list(reversed(coeffs)), dtype=complex)
    total = math.log(abs(desc[0]))
    if len(desc) > 1:
        roots = np.roots(desc)
        if not np.all(np.isfinite(roots)):
            raise np.linalg.LinAlgError("root finder failed")
        mod = np.abs(roots)
        total += float(np.log(mod[mod > 1]).sum())
    return total


def _jensen_radius(p_vals_fn, r, n):
    theta = 2 * np.pi * np.arange(n) / n
    vals = p_vals_fn(r * np.exp(1j * theta))
    mean = float(np.mean(np.log(np.abs(vals))))
    phase = np.unwrap(np.angle(vals))
    winding = (phase[-1] - phase[0] + np.angle(vals[0] / vals[-1])) / (2 * np.pi)
    return mean, int(round(winding)), abs(winding - round(winding))


def jensen_log_measure(p, delta=1e-3, n=1 << 16):
    """Log Mahler measure by trapezoidal integration of ``ln|p|``.

    Integrates on the circles of radius ``1 +- delta`` (where the integrand
    is smooth even if ``p`` vanishes on the unit circle) and removes the
    ``W * ln r`` offset using the winding number ``W``; the inner and outer
    values must agree, otherwise ``delta`` is shrunk.
    """
    low, coeffs = laurent_coefficients(p)
    if not coeffs:
        return 0.0
    if _is_rational_poly(coeffs) and len(coeffs) > 2:
        # integrate each square-free factor on its own: repeated roots on the
        # unit circle cause catastrophic cancellation in the expanded form
        z = sympy.Symbol("z")
        qs = [_as_rational(c) for c in reversed(coeffs)]
        lead, factors = sympy.Poly([sympy.Rational(q.numerator, q.denominator) for q in qs],
                                   z).factor_list()
        if len(factors) > 1 or factors[0][1] > 1:
            Z = p.ctx
            total = math.log(abs(float(lead)))
            for f, mult in factors:
                fc = [Fraction(int(x.p), int(x.q)) for x in reversed(f.all_coeffs())]
                g = GroupRingElement(Z, {(k,): c for k, c in enumerate(fc) if c})
                total += mult * jensen_log_measure(g, delta, n)
            return total
    c = np.array([complex(x) for x in coeffs])

    def evaluate(z):
        return np.polyval(c[::-1], z) * z ** low

    for _ in range(6):
        vals = []
        for r in (1 + delta, 1 - delta):
            mean, w, off = _jensen_radius(evaluate, r, n)
            if off > 1e-3:
                break
            vals.append(mean - w * math.log(r))
        if len(vals) == 2 and abs(vals[0] - vals[1]) < 1e-10:
            return 0.5 * (vals[0] + vals[1])
        delta /= 8
        n *= 4
        if n > 1 << 24:
            break
    raise OracleError("Jensen integration did not stabilise (root close to the unit circle)")


def mahler_log_det(p, check=True, tol=1e-8):
    """``ln det`` of ``r_p`` over Z: ``ln|C| + sum_{|a_k|>1} ln|a_k|``.

    Roots of the exact square-free factors are used when coefficients are
    rational; the value is cross-checked against :func:`jensen_log_measure`.
    The zero polynomial returns 0 (determinant of the zero map is 1).
    """
    low, coeffs = laurent_coefficients(p)
    if not coeffs:
        return 0.0
    try:
        value = _log_measure_roots(coeffs)
    except (np.linalg.LinAlgError, ValueError):
        warnings.warn("root finding failed; using Jensen integration only")
        return jensen_log_measure(p)
    if check:
        try:
            j = jensen_log_measure(p)
        except OracleError as exc:
            warnings.warn(f"Jensen cross-check unavailable: {exc}")
        else:
            if abs(j - value) > tol:
                warnings.warn(f"root formula {value} and Jensen integral {j} differ by {abs(j - value):.3g}")
    return value


def principal_minor_sum(M, r):
    """Sum of the ``r x r`` principal minors of a square matrix over a commutative group ring."""
    one = GroupRingElement.one(M.ctx, M.exact)
    if r == 0:
        return one
    total = GroupRingElement.zero(M.ctx, M.exact)
    for idx in itertools.combinations(range(M.rows), r):
        total = total + _det([[M.entries[i][j] for j in idx] for i in idx], one)
    return total


def _det(rows, one):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = one * 0
    for j in range(n):
        a = rows[0][j]
        if not a.terms:
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = multiply(a, _det(minor, one))
        total = total + term if j % 2 == 0 else total - term
    return total


def torus_log_det(A, dim_ker=None, grid_exponent=None):
    """``ln det r_A`` over Z^n.

    Over Z this is ``1/2 * mahler(e_r(A A*))`` with ``r`` the generic rank
    and ``e_r`` the sum of principal ``r x r`` minors (the product of the
    non-zero eigenvalues of ``A(z)A(z)*``).  For rank >= 2 the torus integral
    is done by midpoint quadrature and is only approximate.
    """
    _require(A, "free_abelian")
    if dim_ker is None:
        dim_ker = torus_kernel_dim(A)
    r = A.rows - int(dim_ker)
    if r == 0:
        return 0.0
    if A.ctx.rank == 1:
        poly = principal_minor_sum(mat_multiply(A, adjoint(A)), r)
        return 0.5 * mahler_log_det(poly)
    k = default_grid_exponent(A.ctx.rank) if grid_exponent is None else grid_exponent
    th = torus_grid(A.ctx.rank, k, offset=0.5)
    S = symbol(A, th)
    ev = np.linalg.eigvalsh(S @ np.conj(np.transpose(S, (0, 2, 1))))
    top = np.clip(ev[:, -r:], 1e-300, None)
    return 0.5 * float(np.log(top).sum(axis=1).mean())
