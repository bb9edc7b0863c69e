"""Complex log-gamma plus the gamma identities used elsewhere in the package.

Every product of gamma factors in the package is accumulated as a sum of
``log_gamma`` values and exponentiated once.
"""
import cmath
import math
from fractions import Fraction

import numpy as np
from scipy import special

from .errors import PoleError

POLE_TOL = 1e-13
LOG_2PI = math.log(2.0 * math.pi)
# above this multiple of max(1, |a1|, |a2|) the ratio comes from its asymptotic series
_SERIES_X = 20.0


def bernoulli_numbers(n):
    """Exact B_0 .. B_n as Fractions (B_1 = -1/2)."""
    out = [Fraction(1)]
    for m in range(1, n + 1):
        out.append(-sum(math.comb(m + 1, k) * out[k] for k in range(m)) / (m + 1))
    return out


_B = bernoulli_numbers(32)
# coefficients of the Bernoulli polynomial B_n(a), highest power first
_BPOLY = [[float(math.comb(n, k) * _B[k]) for k in range(n + 1)] for n in range(32)]


def _bernoulli_poly(n, a):
    acc = 0j
    for c in _BPOLY[n]:
        acc = acc * a + c
    return acc


def _near_pole(z):
    z = np.asarray(z)
    re = z.real
    return (re <= 0.5) & (np.abs(z.imag) <= POLE_TOL) & (np.abs(re - np.round(re)) <= POLE_TOL)


def log_gamma(z):
    """Principal-branch log Gamma(z) for a scalar complex ``z``.

    Raises PoleError within 1e-13 of 0, -1, -2, ...
    """
    z = complex(z)
    if _near_pole(z):
        raise PoleError(f"log_gamma has a pole at {z!r}")
    return complex(special.loggamma(z))


def log_gamma_array(z):
    """Vectorised ``log_gamma`` over a complex array (same pole rule)."""
    z = np.asarray(z, dtype=complex)
    if np.any(_near_pole(z)):
        bad = z[_near_pole(z)].ravel()[0]
        raise PoleError(f"log_gamma has a pole at {bad!r}")
    return special.loggamma(z)


def gamma(z):
    return cmath.exp(log_gamma(z))


def wrap_imag(w):
    """Reduce the imaginary part of ``w`` into [-pi, pi]."""
    return complex(w.real, math.remainder(w.imag, 2.0 * math.pi))


def gauss_multiplication_residual(z, m):
    """Residual of Gauss' multiplication formula in log form.

    |log Gamma(mz) - [(1-m)/2 log 2pi + (mz - 1/2) log m + sum_k log Gamma(z + k/m)]|
    with the imaginary part taken modulo 2*pi.
    """
    if int(m) != m or m < 1:
        raise ValueError("m must be a positive integer")
    m = int(m)
    z = complex(z)
    lhs = log_gamma(m * z)
    rhs = 0.5 * (1 - m) * LOG_2PI + (m * z - 0.5) * math.log(m)
    rhs += sum(log_gamma(z + k / m) for k in range(m))
    return abs(wrap_imag(lhs - rhs))


def asymptotic_gamma_ratio(x, a1, a2):
    """Gamma(x + a1) * x**(a2 - a1) / Gamma(x + a2), evaluated in log space."""
    if x <= 0:
        raise ValueError("x must be positive")
    a1 = complex(a1)
    a2 = complex(a2)
    if a1 == a2:
        return 1.0 + 0j
    if x < _SERIES_X * max(1.0, abs(a1), abs(a2)):
        w = log_gamma(x + a1) - log_gamma(x + a2) + (a2 - a1) * math.log(x)
        return cmath.exp(w)
    # the log-gamma difference cancels badly for large x; sum
    # log Gamma(x+a) - (x+a-1/2) log x + x - log(2 pi)/2 ~ sum (-1)^(n+1) B_{n+1}(a) / (n(n+1) x^n)
    w = 0j
    inv = 1.0 / x
    for n in range(1, 30):
        term = (_bernoulli_poly(n + 1, a1) - _bernoulli_poly(n + 1, a2)) * inv ** n / (n * (n + 1))
        w += term if n % 2 else -term
        if abs(term) <= 1e-17 * abs(w):
            break
    return cmath.exp(w)
