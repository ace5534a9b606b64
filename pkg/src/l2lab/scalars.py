"""Exact Gaussian rationals and scalar-mode helpers.

Exact mode stores real coefficients as ``int``/``Fraction`` and genuinely
complex ones as :class:`QI`.  Float mode uses ``float``/``complex``.  The two
modes are never mixed inside one group ring element.
"""
import math
from fractions import Fraction
from numbers import Rational


class ModeError(TypeError):
    """Exact and float scalars were combined."""


class QI:
    """A Gaussian rational ``re + im*i`` with rational (or integer) parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = re
        self.im = im

    @staticmethod
    def make(re, im=0):
        """Return ``re`` itself when the imaginary part vanishes."""
        return re if im == 0 else QI(re, im)

    def _parts(self, other):
        if isinstance(other, QI):
            return other.re, other.im
        if isinstance(other, Rational):
            return other, 0
        return NotImplemented

    def __add__(self, other):
        o = self._parts(other)
        if o is NotImplemented:
            return o
        return QI.make(self.re + o[0], self.im + o[1])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._parts(other)
        if o is NotImplemented:
            return o
        return QI.make(self.re - o[0], self.im - o[1])

    def __rsub__(self, other):
        o = self._parts(other)
        if o is NotImplemented:
            return o
        return QI.make(o[0] - self.re, o[1] - self.im)

    def __mul__(self, other):
        o = self._parts(other)
        if o is NotImplemented:
            return o
        a, b = self.re, self.im
        c, d = o
        return QI.make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._parts(other)
        if o is NotImplemented:
            return o
        c, d = Fraction(o[0]), Fraction(o[1])
        den = c * c + d * d
        if den == 0:
            raise ZeroDivisionError("division by zero")
        a, b = self.re, self.im
        return QI.make((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other):
        o = self._parts(other)
        if o is NotImplemented:
            return o
        return QI(o[0], o[1]) / self

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self):
        return QI(self.re, -self.im)

    def __abs__(self):
        return math.hypot(self.re, self.im)

    def norm2(self):
        """Exact squared modulus."""
        return self.re * self.re + self.im * self.im

    def __eq__(self, other):
        o = self._parts(other)
        if o is NotImplemented:
            if isinstance(other, complex):
                return complex(self) == other
            return False
        return self.re == o[0] and self.im == o[1]

    def __hash__(self):
        return hash((self.re, self.im)) if self.im else hash(self.re)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"QI({self.re}, {self.im})"


def is_exact(c):
    return isinstance(c, (Rational, QI))


def to_exact(c):
    """Convert ``c`` to an exact scalar; floats are converted exactly."""
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, QI):
        return QI.make(to_exact(c.re), to_exact(c.im))
    if isinstance(c, float):
        return to_exact(Fraction(c))
    if isinstance(c, complex):
        return QI.make(to_exact(Fraction(c.real)), to_exact(Fraction(c.imag)))
    if isinstance(c, str):
        if "j" in c:
            return to_exact(complex(c))
        return to_exact(Fraction(c))
    if isinstance(c, Rational):
        return to_exact(Fraction(c.numerator, c.denominator))
    raise TypeError(f"cannot use {c!r} as an exact scalar")


def to_float(c):
    if isinstance(c, QI):
        return complex(c)
    if isinstance(c, complex):
        return c if c.imag else c.real
    if isinstance(c, str):
        return to_float(complex(c)) if "j" in c else float(Fraction(c))
    return float(c)


def norm2(c):
    """Squared modulus, exact for exact scalars."""
    if isinstance(c, QI):
        return c.norm2()
    if isinstance(c, complex):
        return c.real * c.real + c.imag * c.imag
    return c * c


def abs_upper(c):
    """A rational upper bound for ``|c|`` (exact for real scalars)."""
    if isinstance(c, QI):
        return abs(Fraction(c.re)) + abs(Fraction(c.im))
    return abs(c)


def real_part(c):
    if isinstance(c, QI):
        return c.re
    if isinstance(c, complex):
        return c.real
    return c


def imag_part(c):
    if isinstance(c, QI):
        return c.im
    if isinstance(c, complex):
        return c.imag
    return 0


def denominator(c):
    if isinstance(c, QI):
        return math.lcm(Fraction(c.re).denominator, Fraction(c.im).denominator)
    return Fraction(c).denominator


def to_integral(c, scale):
    """``c * scale`` as an int (or a QI with int parts); must be integral."""
    v = c * scale
    if isinstance(v, QI):
        re, im = Fraction(v.re), Fraction(v.im)
        if re.denominator != 1 or im.denominator != 1:
            raise ValueError("scale does not clear denominators")
        return QI.make(re.numerator, im.numerator)
    v = Fraction(v)
    if v.denominator != 1:
        raise ValueError("scale does not clear denominators")
    return v.numerator
