"""Command-line front end.

Every subcommand writes one JSON report (``--output`` or stdout) with a
fixed top-level layout::

    {"schema": 1, "command": ..., "inputs": {...sha256...}, "config": {...},
     "result": {...}, "provenance": [...], "warnings": [...], "oracle": {...}}

Exit codes: 0 success, 2 validation / malformed input, 3 resource cap hit
(a partial report is still written).
"""
import argparse
import csv
import hashlib
import json
import math
import os
import sys
import warnings
from fractions import Fraction

from . import __version__
from . import approximation, oracles
from .complexes import l2_betti_numbers, l2_euler_characteristic, l2_torsion, validate_complex
from .estimators import (ResourceLimitError, TruncationError, TruncationPolicy,
                         characteristic_sequence, fk_log_det, kernel_dimension, ns_beta)
from .io import FormatError, cells_from_json, complex_from_json, load_json, matrix_from_json

SCHEMA = 1
EXIT_OK, EXIT_INVALID, EXIT_RESOURCE = 0, 2, 3


class UsageError(ValueError):
    pass


def _frac(s):
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from None


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _int_list(s):
    try:
        out = [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {s!r}") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError("levels must be positive integers")
    return out


def _clean(v):
    """JSON-safe copy: Fractions become strings, non-finite floats become strings."""
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if hasattr(v, "item") and not isinstance(v, (str, bytes)):
        return _clean(v.item())
    return v


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def build_parser():
    p = argparse.ArgumentParser(prog="l2lab", description="L2-invariants of group ring matrices")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="report path (default: stdout)")
    common.add_argument("--precision", choices=["exact", "float"],
                        help="arithmetic mode (default: exact, float for det/ns)")
    common.add_argument("--workers", type=_positive_int,
                        help="process pool size (fallback: $L2LAB_WORKERS)")
    common.add_argument("--k-squared", type=_frac, help="user-asserted K^2 (must dominate ||A||^2)")
    common.add_argument("--p-max", type=_positive_int, help="characteristic sequence length")
    common.add_argument("--max-word-length", type=int, help="truncate supports beyond this radius")
    common.add_argument("--coeff-floor", type=float, default=0.0, help="drop coefficients below this")
    common.add_argument("--allow-approximate", action="store_true",
                        help="permit truncation in exact mode (results become heuristic)")
    common.add_argument("--max-terms", type=_positive_int, help="abort when a support grows past this")
    common.add_argument("--emit-plot-data", metavar="CSV", help="write (p, c_p) and (L, S_L) series")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("kernel-dim", parents=[common], help="estimate dim ker r_A")
    s.add_argument("--matrix", required=True)
    s.add_argument("--snap-denominator", type=_positive_int)
    s.add_argument("--snap-tol", type=float, default=0.05)

    s = sub.add_parser("det", parents=[common], help="log Fuglede-Kadison determinant")
    s.add_argument("--matrix", required=True)
    s.add_argument("--dim-ker", type=_frac, help="kernel dimension (default: oracle when available)")
    s.add_argument("--L", dest="L", type=_positive_int, default=1000, help="number of terms")

    s = sub.add_parser("ns", parents=[common], help="Novikov-Shubin decay exponent")
    s.add_argument("--matrix", required=True)
    s.add_argument("--dim-ker", type=_frac)
    s.add_argument("--window", type=_int_list, help="p_min,p_max of the log-log fit")

    s = sub.add_parser("betti", parents=[common], help="L2-Betti numbers of a chain complex")
    s.add_argument("--complex", required=True)
    s.add_argument("--snap-denominator", type=_positive_int)
    s.add_argument("--snap-tol", type=float, default=0.05)
    s.add_argument("--laplacian-check", action="store_true")

    s = sub.add_parser("torsion", parents=[common], help="L2-torsion of an acyclic complex")
    s.add_argument("--complex", required=True)
    s.add_argument("--dim-ker", type=lambda x: [_frac(t) for t in x.split(",")],
                   help="comma separated dim ker c_1..c_top (default: oracle)")
    s.add_argument("--L", dest="L", type=_positive_int, default=2000)
    s.add_argument("--method", choices=["auto", "estimator", "mahler", "finite"], default="auto")

    s = sub.add_parser("euler", parents=[common], help="L2-Euler characteristic from cell data")
    s.add_argument("--cells", required=True)

    s = sub.add_parser("approx", parents=[common], help="finite quotient tower")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--matrix")
    g.add_argument("--complex")
    s.add_argument("--tower", type=_int_list, required=True, help="levels k1,k2,...")

    s = sub.add_parser("oracle", parents=[common], help="independent exact/numerical values")
    s.add_argument("--matrix", required=True)
    return p


class _Run:
    def __init__(self, args):
        self.args = args
        self.inputs = {}
        self.provenance = []
        self.oracle = {}
        self.plot = []

    def exact(self, default=True):
        if self.args.precision is None:
            return default
        return self.args.precision == "exact"

    def load(self, kind, path, exact):
        if not os.path.isfile(path):
            raise UsageError(f"input file not found: {path}")
        self.inputs[kind] = {"path": path, "sha256": _sha256(path)}
        obj = load_json(path)
        if kind == "matrix":
            return matrix_from_json(obj, exact)
        if kind == "complex":
            C = complex_from_json(obj, exact)
            check = validate_complex(C)
            if not check:
                raise FormatError(check.message, f"/differentials/{check.degree - 1}")
            return C
        return cells_from_json(obj)

    def policy(self):
        a = self.args
        return TruncationPolicy(max_word_length=a.max_word_length, coeff_floor=a.coeff_floor,
                                allow_approximate=a.allow_approximate)

    def config(self):
        skip = {"output", "emit_plot_data"}
        return {k: _clean(v) for k, v in sorted(vars(self.args).items()) if k not in skip}

    def seq_plot(self, report, label="c"):
        for p, v in enumerate(report.floats(), start=1):
            self.plot.append((label, p, v))


def _cmd_kernel_dim(run):
    a = run.args
    A = run.load("matrix", a.matrix, run.exact())
    est = kernel_dimension(A, p_max=a.p_max, K=a.k_squared, policy=run.policy(),
                           snap_denominator=a.snap_denominator, snap_tol=a.snap_tol,
                           workers=a.workers, max_terms=a.max_terms)
    run.seq_plot(est.report)
    run.provenance.append(est.provenance)
    _try_oracle(run, A, kernel_only=True)
    return {"sequence": est.report.to_dict(), "estimate": est.to_dict(), "value": est.value}


def _oracle_dim(run, A):
    fam = A.ctx.family
    if fam == "finite":
        return oracles.finite_kernel_dim(A), "oracle:finite"
    if fam == "free_abelian":
        return oracles.torus_kernel_dim(A), "oracle:torus"
    raise UsageError(f"--dim-ker is required for the {fam} group")


def _cmd_det(run):
    a = run.args
    A = run.load("matrix", a.matrix, run.exact(default=False))
    if a.dim_ker is None:
        d, prov = _oracle_dim(run, A)
    else:
        d, prov = a.dim_ker, "user"
    run.provenance.append(prov)
    report = characteristic_sequence(A, a.k_squared, a.L, policy=run.policy(),
                                     max_terms=a.max_terms, workers=a.workers)
    est = fk_log_det(A, d, a.L, report=report, provenance=prov)
    run.seq_plot(report)
    run.plot.extend(("S", L, v) for L, v in enumerate(est.partial_sums, start=1))
    _try_oracle(run, A, dim_ker=d)
    out = est.to_dict()
    out["sequence"] = report.to_dict()
    return out


def _cmd_ns(run):
    a = run.args
    A = run.load("matrix", a.matrix, run.exact(default=False))
    if a.dim_ker is None:
        d, prov = _oracle_dim(run, A)
    else:
        d, prov = a.dim_ker, "user"
    run.provenance.append(prov)
    window = a.window or [max(1, (a.p_max or 200) // 4), a.p_max or 200]
    if len(window) != 2:
        raise UsageError("--window takes exactly two values")
    report = characteristic_sequence(A, a.k_squared, window[1], policy=run.policy(),
                                     max_terms=a.max_terms, workers=a.workers)
    run.seq_plot(report)
    est = ns_beta(report, d, tuple(window))
    out = est.to_dict()
    out["dim_ker"] = d
    out["alpha_from_beta"] = "inf+" if est.infinite else 2 * est.beta_hat
    if A.ctx.family == "free_abelian":
        alpha, res = oracles.torus_novikov_shubin(A)
        run.oracle["novikov_shubin_alpha"] = alpha.to_json()
        run.oracle["fit_residual"] = res
    elif A.ctx.family == "finite":
        run.oracle["novikov_shubin_alpha"] = oracles.finite_novikov_shubin().to_json()
    return out


def _cmd_betti(run):
    a = run.args
    C = run.load("complex", a.complex, run.exact())
    rep = l2_betti_numbers(C, p_max=a.p_max, policy=run.policy(),
                           snap_denominator=a.snap_denominator, snap_tol=a.snap_tol,
                           laplacian_check=a.laplacian_check, workers=a.workers,
                           k_squared=a.k_squared)
    for p, k in enumerate(rep.kernel_estimates):
        if k is not None:
            run.seq_plot(k.report, label=f"c[{p}]")
            run.provenance.append(f"c_{p}:{k.provenance}")
    out = rep.to_dict()
    out["euler_ok"] = rep.euler.ok
    if C.ctx.family in ("free_abelian", "finite"):
        dims = [oracles.torus_kernel_dim(d) if C.ctx.family == "free_abelian"
                else oracles.finite_kernel_dim(d) for d in C.differentials]
        dk = [Fraction(C.ranks[0])] + dims + [Fraction(0)]
        run.oracle["betti"] = [dk[p] - ((C.ranks[p + 1] if p < C.top else 0) - dk[p + 1])
                               for p in range(C.top + 1)]
    return out


def _cmd_torsion(run):
    a = run.args
    C = run.load("complex", a.complex, run.exact(default=False))
    dims = a.dim_ker
    rep = l2_torsion(C, dim_kers=dims, L=a.L, method=a.method,
                     provenance="user" if dims else None, k_squared=a.k_squared, workers=a.workers)
    run.provenance.append(rep.provenance)
    return rep.to_dict()


def _cmd_euler(run):
    cells = run.load("cells", run.args.cells, True)
    chi, m = l2_euler_characteristic(cells)
    return {"chi2": chi, "chi2_float": float(chi), "m": m, "cells": len(cells)}


def _cmd_approx(run):
    a = run.args
    obj = (run.load("matrix", a.matrix, run.exact()) if a.matrix
           else run.load("complex", a.complex, run.exact()))
    table = approximation.tower(obj, a.tower)
    rows = [{"level": k, "value": v, "value_float": (float(v) if not isinstance(v, list)
                                                      else [float(x) for x in v])}
            for k, v in table]
    for k, v in table:
        run.plot.append(("tower", k, float(v) if not isinstance(v, list) else float(v[0])))
    if a.matrix and obj.ctx.family == "free_abelian":
        run.oracle["kernel_dim"] = oracles.torus_kernel_dim(obj)
    return {"tower": rows}


def _cmd_oracle(run):
    A = run.load("matrix", run.args.matrix, run.exact())
    fam = A.ctx.family
    if fam == "finite":
        return {"kernel_dim": oracles.finite_kernel_dim(A),
                "fk_det": float(oracles.finite_fk_det(A)),
                "novikov_shubin_alpha": oracles.finite_novikov_shubin().to_json(),
                "provenance": "oracle:finite"}
    if fam == "free_abelian":
        d = oracles.torus_kernel_dim(A)
        alpha, res = oracles.torus_novikov_shubin(A)
        dens = oracles.torus_spectral_density(A, [1e-3, 1e-2, 1e-1, 1.0])
        return {"kernel_dim": d, "log_det": oracles.torus_log_det(A, d),
                "log_det_method": "mahler" if A.ctx.rank == 1 else "quadrature",
                "novikov_shubin_alpha": alpha.to_json(), "fit_residual": res,
                "spectral_density": dens.to_dict(), "provenance": "oracle:torus"}
    if fam == "lamplighter":
        return {"quotient_tower": [{"level": k, "value": v}
                                   for k, v in approximation.tower(A, range(1, 9))],
                "provenance": "oracle:quotient"}
    raise UsageError(f"no oracle for the {fam} group")


def _try_oracle(run, A, kernel_only=False, dim_ker=None):
    try:
        if A.ctx.family == "finite":
            run.oracle["kernel_dim"] = oracles.finite_kernel_dim(A)
            if not kernel_only:
                run.oracle["log_det"] = math.log(oracles.finite_fk_det(A))
        elif A.ctx.family == "free_abelian":
            run.oracle["kernel_dim"] = oracles.torus_kernel_dim(A)
            if not kernel_only:
                run.oracle["log_det"] = oracles.torus_log_det(A, dim_ker)
    except oracles.OracleError as exc:
        run.oracle["error"] = str(exc)


COMMANDS = {"kernel-dim": _cmd_kernel_dim, "det": _cmd_det, "ns": _cmd_ns, "betti": _cmd_betti,
            "torsion": _cmd_torsion, "euler": _cmd_euler, "approx": _cmd_approx,
            "oracle": _cmd_oracle}


def _emit(run, result, caught, status, error=None):
    report = {
        "schema": SCHEMA,
        "command": run.args.command,
        "status": status,
        "inputs": run.inputs,
        "config": run.config(),
        "result": result,
        "provenance": run.provenance,
        "warnings": [str(w.message) for w in caught],
        "oracle": run.oracle,
    }
    if error:
        report["error"] = error
    text = json.dumps(_clean(report), indent=2, sort_keys=True) + "\n"
    if run.args.output:
        with open(run.args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if run.args.emit_plot_data and run.plot:
        with open(run.args.emit_plot_data, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["series", "x", "y"])
            w.writerows((s, x, repr(float(y))) for s, x, y in run.plot)


def run(args):
    """Execute parsed arguments; returns the process exit code."""
    r = _Run(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            result = COMMANDS[args.command](r)
        except ResourceLimitError as exc:
            partial = exc.partial.to_dict() if hasattr(exc.partial, "to_dict") else None
            _emit(r, {"partial_sequence": partial}, caught, "resource_limit", str(exc))
            print(f"l2lab: {exc}", file=sys.stderr)
            return EXIT_RESOURCE
        except (FormatError, UsageError, TruncationError, ValueError, TypeError,
                oracles.OracleError) as exc:
            print(f"l2lab: error: {exc}", file=sys.stderr)
            return EXIT_INVALID
        _emit(r, result, caught, "ok")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
