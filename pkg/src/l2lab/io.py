"""JSON encodings of groups, group ring elements, matrices, complexes and cells."""
import json
import math
from fractions import Fraction

from .complexes import CellDatum, ChainComplex
from .group_ring import GroupRingElement
from .groups import (DirectProduct, FiniteGroup, FreeAbelianGroup, FreeGroup, FreeProduct,
                     GroupError, LamplighterGroup)
from .matrix import GRMatrix
from .scalars import QI


class FormatError(ValueError):
    """Malformed input; ``location`` is a JSON-pointer-like path."""

    def __init__(self, message, location=""):
        super().__init__(f"{location or '/'}: {message}")
        self.location = location


def group_from_json(obj, loc="/group"):
    if not isinstance(obj, dict) or "family" not in obj:
        raise FormatError("group descriptor needs a 'family'", loc)
    fam = obj["family"]
    try:
        if fam == "finite":
            table = obj["table"]
            if "order" in obj and obj["order"] != len(table):
                raise FormatError(f"order {obj['order']} does not match table size {len(table)}", loc)
            return FiniteGroup(table, identity=obj.get("identity"))
        if fam in ("zn", "free_abelian"):
            return FreeAbelianGroup(int(obj.get("n", obj.get("rank", 1))))
        if fam == "free":
            return FreeGroup(obj.get("rank"), obj.get("generators"))
        if fam == "lamplighter":
            return LamplighterGroup()
        if fam in ("direct_product", "free_product"):
            factors = [group_from_json(f, f"{loc}/factors/{i}") for i, f in enumerate(obj["factors"])]
            return DirectProduct(factors) if fam == "direct_product" else FreeProduct(factors)
    except KeyError as exc:
        raise FormatError(f"missing field {exc}", loc) from None
    except GroupError as exc:
        raise FormatError(str(exc), loc) from None
    raise FormatError(f"unknown group family {fam!r}", loc)


def group_to_json(ctx):
    fam = ctx.family
    if fam == "finite":
        return {"family": "finite", "order": ctx.order, "table": [list(r) for r in ctx.table],
                "identity": ctx.identity}
    if fam == "free_abelian":
        return {"family": "zn", "n": ctx.rank}
    if fam == "free":
        return {"family": "free", "rank": ctx.rank, "generators": list(ctx.generators)}
    if fam == "lamplighter":
        return {"family": "lamplighter"}
    return {"family": fam, "factors": [group_to_json(f) for f in ctx.factors]}


def word_from_json(ctx, w, loc=""):
    fam = ctx.family
    try:
        if fam == "finite":
            g = int(w)
        elif fam == "free_abelian":
            g = tuple(int(x) for x in w)
        elif fam == "free":
            if isinstance(w, str):
                return ctx.parse(w)
            g = ctx.normalize(tuple(int(x) for x in w))
        elif fam == "lamplighter":
            g = ctx.normalize((tuple(int(x) for x in w["lamps"]), int(w["shift"])))
        elif fam == "direct_product":
            g = tuple(word_from_json(f, x, loc) for f, x in zip(ctx.factors, w))
        else:
            g = ()
            for i, x in w:
                g = ctx.mul(g, ctx.syllable(int(i), word_from_json(ctx.factors[int(i)], x, loc)))
    except (TypeError, KeyError, ValueError) as exc:
        raise FormatError(f"bad {fam} word {w!r}: {exc}", loc) from None
    if not ctx.is_element(g):
        raise FormatError(f"{w!r} is not a valid {fam} word", loc)
    return g


def word_to_json(ctx, g):
    fam = ctx.family
    if fam == "finite":
        return g
    if fam in ("free_abelian", "free"):
        return list(g)
    if fam == "lamplighter":
        return {"lamps": list(g[0]), "shift": g[1]}
    if fam == "direct_product":
        return [word_to_json(f, x) for f, x in zip(ctx.factors, g)]
    return [[i, word_to_json(ctx.factors[i], x)] for i, x in g]


def _rational(x, loc):
    try:
        if isinstance(x, list) and len(x) == 2:
            return Fraction(int(x[0]), int(x[1]))
        if isinstance(x, (int, str)) and not isinstance(x, bool):
            return Fraction(x)
        if isinstance(x, float):
            return Fraction(str(x))
    except (ValueError, TypeError, ZeroDivisionError):
        pass
    raise FormatError(f"cannot read {x!r} as a rational", loc)


def scalar_from_json(c, loc=""):
    if isinstance(c, dict):
        re = _rational(c.get("re", 0), loc)
        im = _rational(c.get("im", 0), loc)
        return QI.make(re, im)
    return _rational(c, loc)


def scalar_to_json(c):
    if isinstance(c, QI):
        re, im = Fraction(c.re), Fraction(c.im)
    elif isinstance(c, complex):
        return {"re": c.real, "im": c.imag}
    elif isinstance(c, float):
        return {"re": c, "im": 0.0}
    else:
        re, im = Fraction(c), Fraction(0)
    return {"re": [re.numerator, re.denominator], "im": [im.numerator, im.denominator]}


def element_from_json(ctx, terms, exact=True, loc=""):
    if not isinstance(terms, list):
        raise FormatError("an entry must be a list of terms", loc)
    out = []
    for k, t in enumerate(terms):
        tl = f"{loc}/{k}"
        if not isinstance(t, dict) or "word" not in t or "coeff" not in t:
            raise FormatError("a term needs 'coeff' and 'word'", tl)
        out.append((word_from_json(ctx, t["word"], tl + "/word"), scalar_from_json(t["coeff"], tl + "/coeff")))
    return GroupRingElement(ctx, out, exact=exact)


def element_to_json(u):
    return [{"coeff": scalar_to_json(c), "word": word_to_json(u.ctx, g)} for g, c in u.sorted_terms()]


def matrix_from_json(obj, exact=True, ctx=None, loc=""):
    if not isinstance(obj, dict):
        raise FormatError("matrix must be an object", loc)
    if ctx is None:
        ctx = group_from_json(obj.get("group"), loc + "/group")
    try:
        rows, cols, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
    except KeyError as exc:
        raise FormatError(f"missing field {exc}", loc) from None
    if len(entries) != rows or any(len(r) != cols for r in entries):
        raise FormatError(f"entries do not match declared shape {rows}x{cols}", loc + "/entries")
    data = [[element_from_json(ctx, e, exact, f"{loc}/entries/{i}/{j}")
             for j, e in enumerate(row)] for i, row in enumerate(entries)]
    return GRMatrix(ctx, data, exact)


def matrix_to_json(A, include_group=True):
    out = {"rows": A.rows, "cols": A.cols,
           "entries": [[element_to_json(e) for e in row] for row in A.entries]}
    if include_group:
        out = {"group": group_to_json(A.ctx), **out}
    return out


def complex_from_json(obj, exact=True):
    if not isinstance(obj, dict):
        raise FormatError("complex must be an object")
    ctx = group_from_json(obj.get("group"))
    diffs = [matrix_from_json(d, exact, ctx, f"/differentials/{i}")
             for i, d in enumerate(obj.get("differentials", []))]
    try:
        return ChainComplex(ctx, diffs, obj.get("ranks"), exact)
    except ValueError as exc:
        raise FormatError(str(exc), "/ranks") from None


def complex_to_json(C):
    return {"group": group_to_json(C.ctx), "ranks": list(C.ranks),
            "differentials": [matrix_to_json(d, include_group=False) for d in C.differentials]}


def cells_from_json(obj):
    if not isinstance(obj, list):
        raise FormatError("cell data must be a list")
    cells = []
    for k, c in enumerate(obj):
        try:
            iso = c.get("isotropy", 1)
            iso = math.inf if iso in ("inf", "infinity") else int(iso)
            cells.append(CellDatum(int(c["dim"]), iso))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise FormatError(f"bad cell datum {c!r}: {exc}", f"/{k}") from None
    return cells


def load_json(path):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from None
