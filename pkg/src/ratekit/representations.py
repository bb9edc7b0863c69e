"""Meijer-G forms of the integrals when delta/rho is a positive integer,
and a unified evaluator that cross-checks quadrature against a Mellin-side route.
"""
import cmath
import enum
import math
from dataclasses import dataclass

from .errors import (CoincidentPoleError, MethodDisagreement, NonIntegerRatio, StripViolation,
                     UnsupportedVariant)
from .gamma import log_gamma
from .integrals import Variant, quad_eval
from .mellin import (MeijerGParams, auto_contour, contour_eval, integral_to_mellin,
                     residue_series_eval)

RATIO_TOL = 1e-12
LOG_2PI = math.log(2.0 * math.pi)


class EvalMethod(str, enum.Enum):
    AUTO = "auto"
    QUADRATURE = "quadrature"
    CONTOUR = "contour"
    SERIES = "series"


@dataclass(frozen=True)
class ReducedForm:
    """``I = prefactor * G`` with ``G`` described by ``g``."""

    g: MeijerGParams
    log_prefactor: float
    m: int
    z: float

    @property
    def prefactor(self):
        return math.exp(self.log_prefactor)


def integer_ratio(spec):
    """delta/rho snapped to the nearest positive integer, or NonIntegerRatio."""
    r = spec.delta / spec.rho
    m = round(r)
    if m < 1 or abs(r - m) > RATIO_TOL:
        raise NonIntegerRatio(f"delta/rho = {r!r} is not a positive integer")
    return int(m)


def lower_parameters(m, exponent):
    return tuple(k / m for k in range(m)) + (exponent,)


def reduce(spec):
    """Exact Meijer-G representation of ``spec`` for integer m = delta/rho.

    z = c b**m / m**m with c = a, a(beta-1) or a(1-beta); lower parameters
    0, 1/m, ..., (m-1)/m, alpha/delta.  Shapes G^{m+1,0}_{0,m+1} (I1),
    G^{m+1,1}_{1,m+1} (I1beta) and G^{m+1,0}_{1,m+1} (I2beta).  With delta = 1
    the exponent alpha/delta is alpha itself, so the corollary forms come out
    of the same code path.
    """
    v = spec.variant
    if v is Variant.I2:
        raise UnsupportedVariant("i2 with a generic cutoff has no G-function form")
    m = integer_ratio(spec)
    if spec.b <= 0:
        raise UnsupportedVariant("the G-function form needs b > 0")
    spec.check_convergent()
    e = spec.alpha / spec.delta
    c = spec.kernel_coefficient
    z = c * spec.b ** m / m ** m
    lower = lower_parameters(m, e)
    # (2 pi)^((1-m)/2) / (rho c^e m^(1/2)), times the pathway gamma factor
    log_pref = 0.5 * (1 - m) * LOG_2PI - math.log(spec.rho) - e * math.log(c) - 0.5 * math.log(m)
    if v is Variant.I1:
        g = MeijerGParams(m + 1, 0, 0, m + 1, (), lower, z)
    elif v is Variant.I1BETA:
        upper = ((spec.beta - 2.0) / (spec.beta - 1.0) + e,)
        g = MeijerGParams(m + 1, 1, 1, m + 1, upper, lower, z)
        log_pref -= log_gamma(spec.gamma_exponent).real
    else:
        upper = ((2.0 - spec.beta) / (1.0 - spec.beta) + e,)
        g = MeijerGParams(m + 1, 0, 1, m + 1, upper, lower, z)
        log_pref += log_gamma((2.0 - spec.beta) / (1.0 - spec.beta)).real
    return ReducedForm(g=g, log_prefactor=log_pref, m=m, z=z)


def _accurate(res, rel_tol):
    return res.abs_error_estimate <= rel_tol * abs(res.value)


def g_value(form, rel_tol=1e-10, **series_kw):
    """prefactor * G by residue series; by contour when poles coincide or the
    series cancels below ``rel_tol``."""
    try:
        res = residue_series_eval(form.g, log_scale=form.log_prefactor, **series_kw)
        if _accurate(res, rel_tol):
            return res
    except CoincidentPoleError:
        pass
    phi = form.g.to_integrand(log_prefactor=form.log_prefactor)
    return contour_eval(phi, auto_contour(phi))


def _contour(spec):
    phi = integral_to_mellin(spec)
    return contour_eval(phi, auto_contour(phi))


def _series(spec):
    # coincident poles need logarithmic residues; the contour covers them instead
    form = reduce(spec)
    try:
        return residue_series_eval(form.g, log_scale=form.log_prefactor)
    except CoincidentPoleError:
        return _contour(spec)


def evaluate(spec, method=EvalMethod.AUTO, rel_tol=1e-10):
    """Evaluate an integral by quadrature, contour, series, or all-with-check.

    SERIES needs integer delta/rho and falls back to the contour when poles
    coincide (the result's method tag says which ran).  AUTO runs quadrature
    plus the series, or the H-form contour when the series is unavailable or
    cancels below ``rel_tol``, and raises MethodDisagreement when the two
    differ by more than 10x their combined error estimates.  The Mellin-side
    value is returned.  I2 is quadrature-only.
    """
    method = EvalMethod(method)
    if method is EvalMethod.QUADRATURE:
        return quad_eval(spec, rel_tol)
    if spec.variant is Variant.I2:
        if method is EvalMethod.AUTO:
            return quad_eval(spec, rel_tol)
        raise UnsupportedVariant("i2 with a generic cutoff is quadrature-only")
    if method is EvalMethod.SERIES:
        return _series(spec)
    if method is EvalMethod.CONTOUR:
        return _contour(spec)

    quad = quad_eval(spec, rel_tol)
    other = None
    try:
        other = _series(spec)
    except NonIntegerRatio:
        pass
    if other is None or not _accurate(other, rel_tol):
        other = _contour(spec)
    if abs(quad.value - other.value) > 10.0 * (quad.abs_error_estimate + other.abs_error_estimate):
        raise MethodDisagreement(quad, other)
    return other


def mellin_moment(spec, s):
    """Mellin transform of b**(1/rho) -> I at ``s``: prefactor * phi(s) * c**(-s/delta).

    Existence strip: Re s > 0 and Re(alpha + s) > 0, plus
    Re s < delta/(beta-1) - alpha for I1beta.
    """
    s = complex(s)
    if spec.variant is Variant.I2:
        raise UnsupportedVariant("i2 with a generic cutoff has no closed-form Mellin transform")
    if not (s.real > 0 and (spec.alpha + s).real > 0):
        raise StripViolation(f"s={s!r} outside the strip Re s > 0")
    if spec.variant is Variant.I1BETA:
        edge = spec.delta * spec.gamma_exponent - spec.alpha
        if not s.real < edge:
            raise StripViolation(f"s={s!r} outside the strip Re s < {edge!r}")
    phi = integral_to_mellin(spec.with_(b=1.0))
    # with b = 1 the base is exactly c**(1/delta)
    return cmath.exp(complex(phi.log_integrand(s)))
