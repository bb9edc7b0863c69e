"""Double-double (about 106-bit) real arithmetic.

Only what the residue series needs: +, -, *, /, exp, log and log|Gamma|
of a real argument. A value is the unevaluated sum ``hi + lo`` with
``|lo| <= ulp(hi)/2``.
"""
import math
from fractions import Fraction

from .errors import PoleError
from .gamma import bernoulli_numbers

_SPLITTER = 134217729.0  # 2**27 + 1
EPS = 2.0 ** -104


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


class DD:
    __slots__ = ("hi", "lo")

    def __init__(self, hi, lo=0.0):
        self.hi = hi
        self.lo = lo

    @classmethod
    def from_fraction(cls, fr):
        hi = float(fr)
        return cls(hi, float(fr - Fraction(hi)))

    def __float__(self):
        return self.hi + self.lo

    def __repr__(self):
        return f"DD({self.hi!r}, {self.lo!r})"

    def __neg__(self):
        return DD(-self.hi, -self.lo)

    def __abs__(self):
        return -self if self.hi < 0 else self

    def __add__(self, other):
        if not isinstance(other, DD):
            s, e = _two_sum(self.hi, float(other))
            return DD(*_quick_two_sum(s, e + self.lo))
        s, e = _two_sum(self.hi, other.hi)
        t, f = _two_sum(self.lo, other.lo)
        e += t
        s, e = _quick_two_sum(s, e)
        e += f
        return DD(*_quick_two_sum(s, e))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, DD):
            b = float(other)
            p, e = _two_prod(self.hi, b)
            return DD(*_quick_two_sum(p, e + self.lo * b))
        p, e = _two_prod(self.hi, other.hi)
        e += self.hi * other.lo + self.lo * other.hi
        return DD(*_quick_two_sum(p, e))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, DD):
            other = DD(float(other))
        q1 = self.hi / other.hi
        r = self - other * q1
        q2 = r.hi / other.hi
        r = r - other * q2
        q3 = r.hi / other.hi
        q1, q2 = _quick_two_sum(q1, q2)
        return DD(q1, q2) + q3

    def __rtruediv__(self, other):
        return DD(float(other)) / self

    def ldexp(self, k):
        return DD(math.ldexp(self.hi, k), math.ldexp(self.lo, k))


LN2 = DD(0.6931471805599453, 2.3190468138462996e-17)
HALF_LOG_2PI = DD(0.9189385332046728, -3.8782941580672414e-17)

_INV_FACT = [DD.from_fraction(Fraction(1, math.factorial(n))) for n in range(13)]


def exp(x):
    if x.hi < -745.0:
        return DD(0.0)
    if x.hi > 709.0:
        raise OverflowError("exp overflow in double-double")
    k = round(x.hi / LN2.hi)
    r = (x - LN2 * k).ldexp(-10)
    acc = _INV_FACT[12]
    for n in range(11, -1, -1):
        acc = acc * r + _INV_FACT[n]
    for _ in range(10):
        acc = acc * acc
    return acc.ldexp(k)


def log(x):
    if not isinstance(x, DD):
        x = DD(float(x))
    if x.hi <= 0.0:
        raise ValueError("log of non-positive value")
    y = DD(math.log(x.hi))
    for _ in range(2):
        y = y + x * exp(-y) - 1.0
    return y


_B = bernoulli_numbers(30)
_STIRLING = [DD.from_fraction(_B[2 * k] / (2 * k * (2 * k - 1))) for k in range(1, 16)]
_STIRLING_MIN_X = 40.0


def lgamma(x):
    """Return ``(log|Gamma(x)|, sign(Gamma(x)))`` for a real double-double ``x``."""
    if not isinstance(x, DD):
        x = DD(float(x))
    v = float(x)
    if v <= 0.0 and abs(v - round(v)) <= 1e-13:
        raise PoleError(f"Gamma has a pole at {v!r}")
    sign = 1.0
    log_prod = DD(0.0)
    n = max(0, math.ceil(_STIRLING_MIN_X - x.hi))
    prod = DD(1.0)
    y = x
    for _ in range(n):
        prod = prod * y
        y = y + 1.0
        if abs(prod.hi) > 1e200:
            if prod.hi < 0:
                sign = -sign
            log_prod = log_prod + log(abs(prod))
            prod = DD(1.0)
    if prod.hi < 0:
        sign = -sign
    log_prod = log_prod + log(abs(prod))

    w = 1.0 / y
    w2 = w * w
    series = _STIRLING[-1]
    for c in reversed(_STIRLING[:-1]):
        series = series * w2 + c
    series = series * w
    val = (y - 0.5) * log(y) - y + HALF_LOG_2PI + series - log_prod
    return val, sign
