"""Finite free chain complexes over a group ring.

The differential ``c_p : C_p -> C_{p-1}`` is an ``n_p x n_{p-1}`` matrix
acting on row vectors, so ``c_{p-1} o c_p`` is the matrix product
``A_p @ A_{p-1}`` and must vanish.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .estimators import NO_TRUNCATION, fk_log_det, kernel_dimension
from .matrix import GRMatrix, adjoint, direct_sum, mat_multiply


class ChainComplex:
    """``differentials[p-1]`` is ``c_p``; ``ranks[p]`` is ``n_p``."""

    def __init__(self, ctx, differentials=(), ranks=None, exact=None):
        differentials = list(differentials)
        if ranks is None:
            if not differentials:
                raise ValueError("a complex without differentials needs explicit ranks")
            ranks = [differentials[0].cols] + [d.rows for d in differentials]
        ranks = [int(n) for n in ranks]
        if len(ranks) != len(differentials) + 1:
            raise ValueError("need exactly one more rank than differentials")
        if exact is None:
            exact = differentials[0].exact if differentials else True
        for d in differentials:
            if d.ctx != ctx:
                raise ValueError("differential over a different group")
        self.ctx = ctx
        self.differentials = differentials
        self.ranks = ranks
        self.exact = exact

    @property
    def top(self):
        return len(self.ranks) - 1

    def differential(self, p):
        """``c_p`` for ``1 <= p <= top``, else None (zero map)."""
        if 1 <= p <= self.top:
            return self.differentials[p - 1]
        return None

    def euler_characteristic(self):
        return sum((-1) ** p * n for p, n in enumerate(self.ranks))

    def direct_sum(self, other):
        if self.top != other.top:
            raise ValueError("direct sum needs complexes of the same length")
        return ChainComplex(self.ctx, [direct_sum(a, b) for a, b in
                                       zip(self.differentials, other.differentials)],
                            [a + b for a, b in zip(self.ranks, other.ranks)], self.exact)

    def to_float(self):
        return ChainComplex(self.ctx, [d.to_float() for d in self.differentials], self.ranks, False)

    def __repr__(self):
        return f"ChainComplex(ranks={self.ranks} over {self.ctx!r})"


@dataclass
class ComplexCheck:
    ok: bool
    degree: int = None
    row: int = None
    col: int = None
    residual: object = None
    message: str = ""

    def __bool__(self):
        return self.ok


def validate_complex(C):
    for p, d in enumerate(C.differentials, start=1):
        if d.rows != C.ranks[p] or d.cols != C.ranks[p - 1]:
            return ComplexCheck(False, p, message=f"c_{p} has shape {d.shape}, expected "
                                                  f"{(C.ranks[p], C.ranks[p - 1])}")
    for p in range(1, C.top):
        prod = mat_multiply(C.differentials[p], C.differentials[p - 1])
        for i, row in enumerate(prod.entries):
            for j, e in enumerate(row):
                if e.terms if C.exact else any(abs(c) > 1e-9 for c in e.terms.values()):
                    return ComplexCheck(False, p, i, j, e,
                                        f"c_{p} o c_{p + 1} is non-zero at ({i}, {j})")
    return ComplexCheck(True)


@dataclass
class EulerCheck:
    alternating_betti: float
    chi: int
    discrepancy: float
    slack: float

    @property
    def ok(self):
        return self.discrepancy <= self.slack + 1e-9


@dataclass
class BettiReport:
    betti: list
    kernel_estimates: list
    euler: EulerCheck
    laplacian_betti: list = None
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "betti": self.betti,
            "kernels": [None if k is None else k.to_dict() for k in self.kernel_estimates],
            "euler": {"alternating_betti": self.euler.alternating_betti, "chi": self.euler.chi,
                      "discrepancy": self.euler.discrepancy, "slack": self.euler.slack},
            "laplacian_betti": self.laplacian_betti,
            "notes": self.notes,
        }


def l2_betti_numbers(C, p_max=None, policy=NO_TRUNCATION, snap_denominator=None, snap_tol=0.05,
                     laplacian_check=False, workers=None, k_squared=None):
    """Estimated L2-Betti numbers ``b_p = dim ker c_p - (n_{p+1} - dim ker c_{p+1})``.

    ``kernel_estimates[p]`` is the estimate for ``c_p`` (None for ``c_0``,
    whose kernel is all of ``C_0``).  Each ``b_p`` uses the estimates'
    ``value`` (snapped when a denominator was given) and is an upper bound
    for the true number when nothing was snapped.
    """
    check = validate_complex(C)
    if not check:
        raise ValueError(f"invalid chain complex: {check.message}")
    kernels = [None]
    for d in C.differentials:
        kernels.append(kernel_dimension(d, p_max=p_max, K=k_squared, policy=policy,
                                        snap_denominator=snap_denominator, snap_tol=snap_tol,
                                        workers=workers))

    def dk(p):
        if p == 0:
            return C.ranks[0]
        if p > C.top:
            return 0
        return kernels[p].value

    betti = []
    for p in range(C.top + 1):
        nxt = C.ranks[p + 1] if p + 1 <= C.top else 0
        betti.append(dk(p) - (nxt - dk(p + 1)))
    chi = C.euler_characteristic()
    alt = math.fsum((-1) ** p * b for p, b in enumerate(betti))
    slack = sum(k.slack for k in kernels[1:]) + 1e-12 * (1 + sum(C.ranks))
    report = BettiReport(betti, kernels, EulerCheck(alt, chi, abs(alt - chi), slack))
    if laplacian_check:
        report.laplacian_betti = [
            kernel_dimension(D, p_max=p_max, policy=policy, snap_denominator=snap_denominator,
                             snap_tol=snap_tol, workers=workers).value
            for D in laplacians(C)
        ]
    return report


def laplacians(C):
    """``Delta_p = c_p c_p* + c_{p+1}* c_{p+1}`` as ``n_p x n_p`` matrices.

    In operator terms this is ``c_p* c_p + c_{p+1} c_{p+1}*``; with row
    vectors composition reverses the matrix product order.
    """
    out = []
    for p in range(C.top + 1):
        D = GRMatrix.zeros(C.ctx, C.ranks[p], C.ranks[p], C.exact)
        low = C.differential(p)
        if low is not None:
            D = D + mat_multiply(low, adjoint(low))
        high = C.differential(p + 1)
        if high is not None:
            D = D + mat_multiply(adjoint(high), high)
        out.append(D)
    return out


@dataclass
class TorsionReport:
    acyclic: bool
    differential_route: float = None
    laplacian_route: float = None
    discrepancy: float = None
    method: str = None
    log_dets: list = None
    laplacian_log_dets: list = None
    dim_kers: list = None
    provenance: str = None
    betti: list = None
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "acyclic": self.acyclic, "torsion": self.differential_route,
            "torsion_laplacian": self.laplacian_route, "discrepancy": self.discrepancy,
            "method": self.method, "log_dets": self.log_dets,
            "laplacian_log_dets": self.laplacian_log_dets,
            "dim_kers": None if self.dim_kers is None else [str(d) for d in self.dim_kers],
            "dim_ker_provenance": self.provenance, "betti": self.betti, "notes": self.notes,
        }


def _oracle_dim_kers(C):
    from . import oracles
    fam = C.ctx.family
    if fam == "free_abelian":
        return [oracles.torus_kernel_dim(d) for d in C.differentials], "oracle:torus"
    if fam == "finite":
        return [oracles.finite_kernel_dim(d) for d in C.differentials], "oracle:finite"
    raise ValueError("dim_kers must be supplied for this group family")


def l2_torsion(C, dim_kers=None, L=2000, method="auto", provenance="user", tol=1e-9,
               k_squared=None, workers=None):
    """L2-torsion ``-sum_p (-1)^p ln det c_p`` and its Laplacian counterpart.

    ``dim_kers[p-1]`` is ``dim ker c_p``; when omitted it comes from the
    torus or finite-group oracle.  ``method`` picks how determinants are
    evaluated: ``"estimator"`` (characteristic-sequence partial sums with
    ``L`` terms), ``"mahler"`` (Z only) or ``"finite"``.
    """
    check = validate_complex(C)
    if not check:
        raise ValueError(f"invalid chain complex: {check.message}")
    if dim_kers is None:
        dim_kers, provenance = _oracle_dim_kers(C)
    dim_kers = [Fraction(d) for d in dim_kers]
    if len(dim_kers) != C.top:
        raise ValueError("need one kernel dimension per differential")
    for p, d in enumerate(dim_kers, start=1):
        if not 0 <= d <= C.ranks[p]:
            raise ValueError(f"dim ker c_{p} = {d} outside [0, {C.ranks[p]}]")

    def dk(p):
        if p == 0:
            return Fraction(C.ranks[0])
        return dim_kers[p - 1] if p <= C.top else Fraction(0)

    betti = []
    for p in range(C.top + 1):
        nxt = C.ranks[p + 1] if p + 1 <= C.top else 0
        betti.append(dk(p) - (nxt - dk(p + 1)))
    report = TorsionReport(acyclic=all(abs(b) <= tol for b in betti), dim_kers=dim_kers,
                           provenance=provenance, betti=[str(b) for b in betti])
    if not report.acyclic:
        report.notes.append("complex is not L2-acyclic; torsion undefined")
        return report

    if method == "auto":
        fam = C.ctx.family
        if fam == "free_abelian" and C.ctx.rank == 1:
            method = "mahler"
        elif fam == "finite":
            method = "finite"
        else:
            method = "estimator"
    report.method = method

    def log_det(A, d):
        if A.is_zero():
            return 0.0
        if method == "mahler":
            from .oracles import torus_log_det
            return torus_log_det(A, d)
        if method == "finite":
            from .oracles import finite_fk_det
            return math.log(finite_fk_det(A))
        est = fk_log_det(A, d, L, K=k_squared, provenance=provenance, workers=workers)
        report.notes.extend(est.warnings)
        return est.value

    dets = [log_det(d, dk(p)) for p, d in enumerate(C.differentials, start=1)]
    report.log_dets = dets
    report.differential_route = 0.0 - math.fsum((-1) ** p * v for p, v in enumerate(dets, start=1))
    lap = []
    for p, D in enumerate(laplacians(C)):
        lap.append(0.0 if p == 0 else log_det(D, Fraction(0)))
    report.laplacian_log_dets = lap
    report.laplacian_route = 0.0 - 0.5 * math.fsum((-1) ** p * p * v for p, v in enumerate(lap))
    report.discrepancy = abs(report.differential_route - report.laplacian_route)
    return report


@dataclass(frozen=True)
class CellDatum:
    dim: int
    isotropy_order: object = 1

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("cell dimension must be non-negative")
        if not (self.isotropy_order == math.inf or
                (isinstance(self.isotropy_order, int) and self.isotropy_order >= 1)):
            raise ValueError("isotropy order must be a positive int or math.inf")


def l2_euler_characteristic(cells):
    """``(sum_c (-1)^dim(c) / |G_c|, sum_c 1/|G_c|)``; infinite isotropy counts 0."""
    chi = Fraction(0)
    m = Fraction(0)
    for c in cells:
        if c.isotropy_order == math.inf:
            continue
        w = Fraction(1, c.isotropy_order)
        chi += (-1) ** c.dim * w
        m += w
    return chi, m
