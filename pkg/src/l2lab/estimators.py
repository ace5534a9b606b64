"""Characteristic sequences and the invariants read off from them.

For ``A`` of shape ``m x n`` and ``K**2 >= ||r_A||**2`` put
``B = 1 - K**-2 A A*`` (an ``m x m`` self-adjoint matrix over CG) and
``c_p = tr_CG(B**p)``.  The sequence is non-negative and non-increasing, its
limit is ``dim ker r_A``, and the log Fuglede-Kadison determinant is

    ln det r_A = (m - d) ln K - 1/2 sum_{p>=1} (c_p - d) / p,   d = dim ker r_A.

Traces are computed row by row.  Since ``B`` is self-adjoint,
``c_2k = sum_i ||e_i B^k||^2`` and ``c_2k+1 = sum_i <e_i B^k, e_i B^k+1>``,
so ``p`` terms cost only ``ceil(p/2)`` applications of ``B`` per row.
When ``A`` has fewer columns than rows the work moves to ``A*``: the traces
of ``(AA*)^j`` and ``(A*A)^j`` agree for ``j >= 1``, hence
``c_p(A) = (m - n) + tr((1 - K**-2 A*A)^p)`` with the same ``K``.  Over a
free group a 1x1 nearest-neighbour radial ``B`` is powered in the algebra
of sphere sums (``radial`` backend), which avoids exponential supports.

In exact mode ``B`` is first scaled by an integer ``s`` that clears all
denominators; the iteration then runs over Python ints and
``c_p = raw_p / s**p`` is an exact Fraction.
"""
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _dense
from .matrix import GRMatrix, KBound, adjoint, k_bound, mat_multiply
from .scalars import QI, denominator, norm2, real_part, to_exact, to_integral


class TruncationError(ValueError):
    """Truncation requested in exact mode without ``allow_approximate``."""


class ResourceLimitError(RuntimeError):
    """Support growth exceeded ``max_terms``; ``partial`` holds what was computed."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class TruncationPolicy:
    max_word_length: int = None
    coeff_floor: float = 0.0
    track_dropped_mass: bool = True
    allow_approximate: bool = False

    @property
    def active(self):
        return self.max_word_length is not None or self.coeff_floor > 0

    def to_dict(self):
        return {"max_word_length": self.max_word_length, "coeff_floor": self.coeff_floor,
                "track_dropped_mass": self.track_dropped_mass,
                "allow_approximate": self.allow_approximate}


NO_TRUNCATION = TruncationPolicy()


@dataclass
class CharSeqReport:
    values: list
    k_squared: object
    k_user_asserted: bool
    rows: int
    exact: bool
    policy: TruncationPolicy = NO_TRUNCATION
    dropped_mass_per_step: list = field(default_factory=list)
    monotone: bool = True
    violations: list = field(default_factory=list)
    complete: bool = True
    p_requested: int = None

    @property
    def p_max(self):
        return len(self.values)

    @property
    def truncated(self):
        return any(d > 0 for d in self.dropped_mass_per_step)

    def c(self, p):
        """``c_p`` for ``p >= 1`` (``c_0 = rows``)."""
        if p == 0:
            return self.rows
        return self.values[p - 1]

    def floats(self):
        return [float(v) for v in self.values]

    def to_dict(self):
        return {
            "c": [_jsonable(v) for v in self.values],
            "k_squared": _jsonable(self.k_squared),
            "k_user_asserted": self.k_user_asserted,
            "rows": self.rows,
            "exact": self.exact,
            "policy": self.policy.to_dict(),
            "dropped_mass": self.dropped_mass_per_step,
            "monotone": self.monotone,
            "violations": self.violations,
            "complete": self.complete,
        }


def _jsonable(v):
    if isinstance(v, Fraction):
        return {"exact": f"{v.numerator}/{v.denominator}", "float": float(v)}
    if isinstance(v, int):
        return v
    return float(v)


def default_p_max(ctx):
    return 12 if ctx.family == "lamplighter" else 200


def _check_monotone(values, rows, exact):
    viol = []
    prev = rows
    for p, v in enumerate(values, start=1):
        if exact:
            bad = v > prev or v < 0
        else:
            tol = 1e-12 * max(1.0, rows)
            bad = v > prev + tol or v < -tol
        if bad:
            viol.append(p)
        prev = v
    return viol


def _scaled_kernel_matrix(A, K):
    """The matrix ``s*B`` as term lists plus the scale ``s``."""
    m = A.rows
    AA = mat_multiply(A, adjoint(A))
    if A.exact:
        k2 = to_exact(K.k_squared)
        if isinstance(k2, QI) or k2 <= 0:
            raise ValueError("k_squared must be a positive real")
        inv_k2 = Fraction(1) / Fraction(k2)
    else:
        inv_k2 = 1.0 / float(K.k_squared)
    terms = {}
    for i in range(m):
        for j in range(m):
            e = {g: -c * inv_k2 for g, c in AA.entries[i][j].terms.items()}
            if i == j:
                idn = A.ctx.identity
                e[idn] = e.get(idn, 0) + 1
            e = {g: c for g, c in e.items() if c != 0}
            if e:
                terms[(i, j)] = e
    if not A.exact:
        return {k: list(v.items()) for k, v in terms.items()}, 1
    scale = 1
    for e in terms.values():
        for c in e.values():
            scale = math.lcm(scale, denominator(c))
    return {k: [(g, to_integral(c, scale)) for g, c in v.items()] for k, v in terms.items()}, scale


def _iterate_row_dict(i, kernels, m, ctx, n_steps, exact, scale, policy, max_terms):
    mul = ctx.mul
    by_row = {}
    for (a, b), terms in kernels.items():
        by_row.setdefault(a, []).append((b, terms))
    r = [dict() for _ in range(m)]
    r[i][ctx.identity] = 1 if exact else 1.0
    contrib = [1 if exact else 1.0]
    dropped = []
    radius = policy.max_word_length
    floor = policy.coeff_floor
    wl = ctx.word_length
    for k in range(n_steps):
        new = [dict() for _ in range(m)]
        for a, ra in enumerate(r):
            if not ra:
                continue
            for b, terms in by_row.get(a, ()):
                acc = new[b]
                get = acc.get
                for g, x in ra.items():
                    for h, c in terms:
                        key = mul(g, h)
                        acc[key] = get(key, 0) + x * c
        d = 0.0
        level = scale ** (k + 1)
        for b in range(m):
            acc = new[b]
            if exact:
                acc = {g: c for g, c in acc.items() if c != 0}
            else:
                acc = {g: c for g, c in acc.items() if abs(c) >= 1e-300}
            if radius is not None or floor:
                keep = {}
                cut = floor * level
                for g, c in acc.items():
                    if (radius is not None and wl(g) > radius) or abs(c) < cut:
                        d += float(abs(c)) / level
                    else:
                        keep[g] = c
                acc = keep
            new[b] = acc
        dropped.append(d)
        odd = 0
        even = 0
        for b in range(m):
            nb = new[b]
            for g, x in r[b].items():
                y = nb.get(g)
                if y is not None:
                    odd += x * y.conjugate()
            for y in nb.values():
                even += norm2(y)
        contrib.append(real_part(odd))
        contrib.append(even)
        r = new
        if max_terms is not None and sum(len(x) for x in r) > max_terms:
            return contrib, dropped, False
    return contrib, dropped, True


def _radial_form(kernels, ctx):
    """``(b0, b1)`` if the single entry is ``b0 + b1 * sigma_1``, else None."""
    if ctx.family != "free" or set(kernels) - {(0, 0)}:
        return None
    terms = dict(kernels.get((0, 0), ()))
    if any(len(g) > 1 for g in terms):
        return None
    b1 = {c for g, c in terms.items() if len(g) == 1}
    if len(b1) > 1 or (b1 and len(terms) - (ctx.identity in terms) != 2 * ctx.rank):
        return None
    return terms.get(ctx.identity, 0), (b1.pop() if b1 else 0)


def _radial_traces(b0, b1, rank, n_steps, zero):
    """Identity coefficients of ``(b0 + b1 sigma_1)^p`` for ``p = 0..n_steps``.

    ``f[k]`` is the common coefficient of the words of length ``k``; right
    multiplication by ``sigma_1`` uses ``sigma_k sigma_1 = sigma_{k+1} +
    q_k sigma_{k-1}`` with ``q_1 = 2r`` and ``q_k = 2r - 1`` for ``k >= 2``.
    """
    f = [zero + 1]
    out = [f[0]]
    for _ in range(n_steps):
        g = [b0 * x for x in f] + [zero]
        for k, x in enumerate(f):
            if not x:
                continue
            g[k + 1] += b1 * x
            if k >= 1:
                g[k - 1] += (2 * rank if k == 1 else 2 * rank - 1) * b1 * x
        f = g
        out.append(f[0])
    return out


def _row_job(args):
    kind, payload = args
    if kind == "dense":
        return _dense.iterate_row(*payload)
    return _iterate_row_dict(*payload)


def _workers(workers):
    if workers is None:
        workers = int(os.environ.get("L2LAB_WORKERS", "1") or 1)
    return max(1, int(workers))


def characteristic_sequence(A, K=None, p_max=None, policy=NO_TRUNCATION, max_terms=None,
                            workers=None, backend="auto"):
    """``c_1 .. c_p_max`` of ``A`` for the bound ``K`` (default: :func:`k_bound`).

    ``backend`` is ``"auto"``, ``"dict"`` or ``"dense"`` (Z^n float mode only).
    Raises :class:`ResourceLimitError` with the partial report attached when a
    row vector's support exceeds ``max_terms``.
    """
    if not isinstance(A, GRMatrix):
        raise TypeError("expected a GRMatrix")
    if K is None:
        K = k_bound(A)
    elif not isinstance(K, KBound):
        K = KBound.user(K)
    if p_max is None:
        p_max = default_p_max(A.ctx)
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    if policy.active and A.exact and not policy.allow_approximate:
        raise TruncationError("truncation in exact mode needs allow_approximate=True")
    ctx = A.ctx
    work = adjoint(A) if A.cols < A.rows else A
    offset = A.rows - work.rows
    m = work.rows
    kernels, scale = _scaled_kernel_matrix(work, K)
    n_steps = (p_max + 1) // 2
    radial = _radial_form(kernels, ctx) if backend in ("auto", "radial") else None
    if backend == "radial" and radial is None:
        raise ValueError("the radial backend needs a 1x1 nearest-neighbour radial kernel over a free group")
    if radial is not None:
        backend = "radial"
    if backend == "radial":
        zero = 0 if A.exact else 0.0
        tr = _radial_traces(radial[0], radial[1], ctx.rank, p_max, zero)
        results = [(tr, [], True)]
    elif backend == "auto":
        backend = "dense" if (ctx.family == "free_abelian" and not A.exact and ctx.rank > 0) else "dict"
    if backend == "radial":
        pass
    elif backend == "dense":
        if ctx.family != "free_abelian" or A.exact:
            raise ValueError("the dense backend handles Z^n in float mode only")
        complex_ = any(isinstance(c, complex) for t in kernels.values() for _, c in t)
        dense_k = {k: [(g, c) for g, c in v] for k, v in kernels.items()}
        jobs = [("dense", (i, dense_k, m, ctx.rank, n_steps,
                           np.complex128 if complex_ else np.float64,
                           policy.max_word_length, policy.coeff_floor, max_terms))
                for i in range(m)]
    elif backend == "dict":
        jobs = [("dict", (i, kernels, m, ctx, n_steps, A.exact, scale, policy, max_terms))
                for i in range(m)]
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if backend != "radial":
        nw = min(_workers(workers), m)
        if nw > 1:
            with ProcessPoolExecutor(max_workers=nw) as pool:
                results = list(pool.map(_row_job, jobs))
        else:
            results = [_row_job(j) for j in jobs]

    reach = min(len(c) - 1 for c, _, _ in results)
    complete = all(ok for _, _, ok in results) and reach >= p_max
    P = min(p_max, reach)
    values = []
    for p in range(1, P + 1):
        raw = sum(c[p] for c, _, _ in results)
        if A.exact:
            if isinstance(raw, QI):
                raise ArithmeticError("non-real trace of a self-adjoint power")
            values.append(offset + Fraction(raw, scale ** p))
        else:
            values.append(offset + float(raw))
    steps = max(len(d) for _, d, _ in results)
    dropped = [sum(d[s] for _, d, _ in results if s < len(d)) for s in range(steps)]
    viol = _check_monotone(values, A.rows, A.exact) if not any(dropped) else []
    report = CharSeqReport(values=values, k_squared=K.k_squared, k_user_asserted=K.user_asserted,
                           rows=A.rows, exact=A.exact, policy=policy, dropped_mass_per_step=dropped,
                           monotone=not viol, violations=viol, complete=complete,
                           p_requested=p_max)
    if not complete:
        raise ResourceLimitError(
            f"support exceeded max_terms={max_terms}; sequence complete up to p={P}", report)
    return report


@dataclass
class DimEstimate:
    """Estimate of ``dim ker r_A``.

    ``upper_bound`` is ``c_P``; ``snapped`` is set only when the caller
    supplied a denominator ``d`` and exactly one multiple of ``1/d`` lies
    within ``snap_tol`` below/at the upper bound.
    """

    upper_bound: float
    snapped: Fraction = None
    snap_denominator: int = None
    notes: list = field(default_factory=list)
    report: CharSeqReport = None
    exact_upper: Fraction = None

    @property
    def value(self):
        return float(self.snapped) if self.snapped is not None else self.upper_bound

    @property
    def slack(self):
        """Distance between the raw upper bound and the reported value."""
        return self.upper_bound - self.value

    @property
    def provenance(self):
        if self.snapped is not None:
            return f"snapped:d={self.snap_denominator}"
        return "estimate:upper_bound"

    def to_dict(self):
        return {
            "upper_bound": self.upper_bound,
            "upper_bound_exact": (f"{self.exact_upper.numerator}/{self.exact_upper.denominator}"
                                  if self.exact_upper is not None else None),
            "snapped": (f"{self.snapped.numerator}/{self.snapped.denominator}"
                        if self.snapped is not None else None),
            "snap_denominator": self.snap_denominator,
            "notes": list(self.notes),
        }


def snap(upper, d, tol):
    """Unique ``q/d`` with ``q/d <= upper + eps`` and ``upper - q/d <= tol``, else None.

    Returns ``(value_or_None, note)``.
    """
    if d is None:
        return None, None
    if d < 1:
        raise ValueError("snap denominator must be >= 1")
    eps = 1e-12
    cands = [Fraction(q, d) for q in range(max(0, math.floor((upper - tol) * d) - 1),
                                           math.floor((upper + eps) * d) + 1)
             if -eps <= upper - q / d <= tol]
    if not cands:
        return None, f"no multiple of 1/{d} within {tol} of {upper}"
    if len(cands) > 1:
        msg = f"ambiguous snap: {len(cands)} multiples of 1/{d} within {tol}; not snapped"
        warnings.warn(msg)
        return None, msg
    return cands[0], (f"snapped to {cands[0]} assuming kernel dimensions of this group "
                      f"lie in (1/{d})Z (Atiyah-type hypothesis for d={d})")


def kernel_dimension(A, p_max=None, K=None, policy=NO_TRUNCATION, snap_denominator=None,
                     snap_tol=0.05, report=None, workers=None, max_terms=None):
    if report is None:
        report = characteristic_sequence(A, K, p_max, policy, max_terms=max_terms, workers=workers)
    last = report.values[-1]
    upper = float(last)
    notes = []
    if report.truncated:
        notes.append("truncated run: upper bound is heuristic")
    snapped, note = snap(upper, snap_denominator, snap_tol)
    if note:
        notes.append(note)
    return DimEstimate(upper_bound=upper, snapped=snapped, snap_denominator=snap_denominator,
                       notes=notes, report=report,
                       exact_upper=last if isinstance(last, Fraction) else None)


@dataclass
class LogDetEstimate:
    value: float
    partial_sums: list
    k_squared: object
    dim_ker: Fraction
    provenance: str
    rows: int
    tail_bound: float = None
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return {"log_det": self.value, "log_det_partial": self.partial_sums,
                "k_squared": _jsonable(self.k_squared), "dim_ker": str(self.dim_ker),
                "dim_ker_provenance": self.provenance, "tail_bound": self.tail_bound,
                "warnings": list(self.warnings)}


def fk_log_det(A, dim_ker, L, K=None, report=None, alpha=None, C=None, provenance="user",
               workers=None):
    """Upper bound ``S_L`` for the log Fuglede-Kadison determinant of ``r_A``.

    ``dim_ker`` must be the true kernel dimension (never inferred here).
    ``S_L`` is non-increasing in ``L``.  With ``alpha`` and ``C`` from the
    caller, ``C / L**alpha`` is reported as the distance to the limit.
    """
    if isinstance(dim_ker, float):
        dim_ker = Fraction(dim_ker).limit_denominator(10**9)
    dim_ker = Fraction(dim_ker)
    if report is None:
        report = characteristic_sequence(A, K, L, workers=workers)
    if report.p_max < L:
        raise ValueError(f"report has only {report.p_max} terms, need {L}")
    m = report.rows
    d = float(dim_ker)
    cs = report.floats()[:L]
    warn = []
    lowest = min(cs)
    if d > lowest + 1e-12:
        raise ValueError(f"dim_ker={dim_ker} exceeds min c_p={lowest}; inconsistent input")
    base = (m - d) * 0.5 * math.log(float(report.k_squared))
    partial = []
    total = 0.0
    comp = 0.0
    for p, c in enumerate(cs, start=1):
        # Kahan summation; the terms are tiny relative to the running sum
        y = (c - d) / p - comp
        t = total + y
        comp = (t - total) - y
        total = t
        partial.append(base - 0.5 * total)
    if len(cs) >= 20:
        tail = [(p, c - d) for p, c in enumerate(cs, start=1) if p > len(cs) // 2 and c - d > 0]
        if len(tail) >= 5:
            x = np.log([p for p, _ in tail])
            y = np.log([r for _, r in tail])
            slope = np.polyfit(x, y, 1)[0]
            if -slope < 0.05:
                warn.append("residuals c_p - dim_ker do not decay; r_A may not be of determinant class")
    tail_bound = None
    if alpha is not None and C is not None:
        tail_bound = C / L ** alpha
    return LogDetEstimate(value=partial[-1], partial_sums=partial, k_squared=report.k_squared,
                          dim_ker=dim_ker, provenance=provenance, rows=m, tail_bound=tail_bound,
                          warnings=warn)


class NSValue:
    """A Novikov-Shubin value in ``[0, inf]`` plus the extra symbol ``inf+``."""

    __slots__ = ("value", "plus")

    def __init__(self, value, plus=False):
        if plus:
            value = math.inf
        elif not value >= 0:
            raise ValueError("Novikov-Shubin values are non-negative")
        self.value = float(value)
        self.plus = bool(plus)

    @classmethod
    def infinity_plus(cls):
        return cls(math.inf, plus=True)

    @property
    def is_infinite(self):
        return math.isinf(self.value)

    def __eq__(self, other):
        if isinstance(other, NSValue):
            return self.value == other.value and self.plus == other.plus
        return not self.plus and self.value == other

    def __hash__(self):
        return hash((self.value, self.plus))

    def __repr__(self):
        if self.plus:
            return "NSValue(inf+)"
        return f"NSValue({self.value})"

    def to_json(self):
        if self.plus:
            return "inf+"
        return "inf" if math.isinf(self.value) else self.value


@dataclass
class NSBetaEstimate:
    beta_hat: float
    fit_window: tuple
    residual: float

    @property
    def infinite(self):
        return math.isinf(self.beta_hat)

    def to_dict(self):
        return {"beta_hat": "inf" if self.infinite else self.beta_hat,
                "fit_window": list(self.fit_window), "residual": self.residual}


def ns_beta(A_or_report, dim_ker, window, K=None):
    """Decay exponent of ``c_p - dim_ker`` from a log-log fit over ``window``.

    Returns an infinite ``beta_hat`` when a residual is exactly zero.
    """
    p_min, p_max = window
    if p_max - p_min + 1 < 5 or p_min < 1:
        raise ValueError("fit window needs at least 5 points with p_min >= 1")
    if isinstance(A_or_report, CharSeqReport):
        report = A_or_report
    else:
        report = characteristic_sequence(A_or_report, K, p_max)
    if report.p_max < p_max:
        raise ValueError(f"report has only {report.p_max} terms, need {p_max}")
    d = Fraction(dim_ker) if report.exact else float(dim_ker)
    res = [report.c(p) - d for p in range(p_min, p_max + 1)]
    if any(r == 0 for r in res):
        return NSBetaEstimate(math.inf, (p_min, p_max), 0.0)
    if any(r < 0 for r in res):
        raise ValueError("c_p - dim_ker is negative; dim_ker is too large")
    x = np.log(np.arange(p_min, p_max + 1, dtype=float))
    y = np.log(np.array([float(r) for r in res]))
    if not np.all(np.isfinite(y)):
        return NSBetaEstimate(math.inf, (p_min, p_max), 0.0)
    coef, resid, *_ = np.polyfit(x, y, 1, full=True)
    rms = float(np.sqrt(resid[0] / len(x))) if len(resid) else 0.0
    return NSBetaEstimate(max(0.0, float(-coef[0])), (p_min, p_max), rms)
