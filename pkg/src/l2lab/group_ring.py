"""The complex group ring CG with exact or floating coefficients."""
from fractions import Fraction

from .scalars import ModeError, QI, abs_upper, is_exact, norm2, to_exact, to_float

FLOAT_DROP = 1e-300


class GroupRingElement:
    """A finitely supported sum ``sum_g c_g * g``.

    ``terms`` maps normal-form group elements to non-zero coefficients.
    Instances are treated as immutable; arithmetic returns new elements.
    """

    __slots__ = ("ctx", "terms", "exact")

    def __init__(self, ctx, terms=None, exact=True, check=False):
        self.ctx = ctx
        self.exact = bool(exact)
        clean = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            conv = to_exact if exact else to_float
            for g, c in items:
                if check:
                    ctx.check(g)
                c = conv(c)
                if g in clean:
                    c = clean[g] + c
                clean[g] = c
            if exact:
                clean = {g: c for g, c in clean.items() if c != 0}
            else:
                clean = {g: c for g, c in clean.items() if abs(c) >= FLOAT_DROP}
        self.terms = clean

    @classmethod
    def _raw(cls, ctx, terms, exact):
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj.terms = terms
        obj.exact = exact
        return obj

    @classmethod
    def zero(cls, ctx, exact=True):
        return cls._raw(ctx, {}, exact)

    @classmethod
    def one(cls, ctx, exact=True):
        return cls._raw(ctx, {ctx.identity: 1 if exact else 1.0}, exact)

    @classmethod
    def monomial(cls, ctx, g, coeff=1, exact=True):
        return cls(ctx, {ctx.check(g): coeff}, exact=exact)

    def _like(self, terms):
        return GroupRingElement._raw(self.ctx, terms, self.exact)

    def _compatible(self, other):
        if self.ctx != other.ctx:
            raise ValueError(f"group context mismatch: {self.ctx!r} vs {other.ctx!r}")
        if self.exact != other.exact:
            raise ModeError("cannot combine exact and float group ring elements")

    def _scalar(self, c):
        if self.exact:
            if not is_exact(c):
                raise ModeError(f"float scalar {c!r} used with an exact element")
            return to_exact(c)
        return to_float(c)

    def _clean(self, acc):
        if self.exact:
            return {g: c for g, c in acc.items() if c != 0}
        return {g: c for g, c in acc.items() if abs(c) >= FLOAT_DROP}

    def __add__(self, other):
        if not isinstance(other, GroupRingElement):
            other = GroupRingElement.one(self.ctx, self.exact) * other
        self._compatible(other)
        acc = dict(self.terms)
        for g, c in other.terms.items():
            acc[g] = acc.get(g, 0) + c
        return self._like(self._clean(acc))

    __radd__ = __add__

    def __neg__(self):
        return self._like({g: -c for g, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GroupRingElement):
            return multiply(self, other)
        c = self._scalar(other)
        if c == 0:
            return self._like({})
        return self._like({g: a * c for g, a in self.terms.items()})

    def __rmul__(self, other):
        if isinstance(other, GroupRingElement):
            return multiply(other, self)
        c = self._scalar(other)
        if c == 0:
            return self._like({})
        return self._like({g: c * a for g, a in self.terms.items()})

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative powers are not defined in CG")
        out = GroupRingElement.one(self.ctx, self.exact)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, GroupRingElement):
            return self.ctx == other.ctx and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def coeff(self, g):
        return self.terms.get(g, 0)

    @property
    def support(self):
        return self.terms.keys()

    def sorted_terms(self):
        key = self.ctx.sort_key
        return sorted(self.terms.items(), key=lambda gc: key(gc[0]))

    def star(self):
        return involute(self)

    def to_float(self):
        return GroupRingElement(self.ctx, self.terms, exact=False)

    def to_exact(self):
        return GroupRingElement(self.ctx, self.terms, exact=True)

    def __repr__(self):
        if not self.terms:
            return "0"
        fmt = getattr(self.ctx, "format", repr)
        parts = [f"({c})*{fmt(g)}" for g, c in self.sorted_terms()]
        return " + ".join(parts)


def element(ctx, terms, exact=True):
    """Build an element from ``{g: c}`` or ``[(g, c), ...]`` with validation."""
    return GroupRingElement(ctx, terms, exact=exact, check=True)


def multiply(u, v):
    """Convolution product ``(uv)(g) = sum_{g1 g2 = g} u(g1) v(g2)``."""
    u._compatible(v)
    mul = u.ctx.mul
    acc = {}
    get = acc.get
    vt = list(v.terms.items())
    for g1, a in u.terms.items():
        for g2, b in vt:
            g = mul(g1, g2)
            acc[g] = get(g, 0) + a * b
    return u._like(u._clean(acc))


def involute(u):
    """``u* = sum_g conj(c_g) g^-1``."""
    inv = u.ctx.inv
    return u._like({inv(g): c.conjugate() for g, c in u.terms.items()})


def trace_cg(u):
    """Coefficient of the identity element."""
    return u.terms.get(u.ctx.identity, 0 if u.exact else 0.0)


def one_norm(u):
    """``sum_g |c_g|``; a Fraction when every coefficient is exact and real."""
    if u.exact and not any(isinstance(c, QI) for c in u.terms.values()):
        return sum((abs(Fraction(c)) for c in u.terms.values()), Fraction(0))
    return float(sum(abs(c) for c in u.terms.values()))


def one_norm_upper(u):
    """Exact rational upper bound for the l1 norm (exact mode only)."""
    return sum((abs_upper(c) for c in u.terms.values()), Fraction(0))


def l2_norm_squared(u):
    """``tr(u* u) = sum_g |c_g|^2``."""
    return sum((norm2(c) for c in u.terms.values()), 0 if u.exact else 0.0)
