"""The four reaction-rate integrand families and their direct quadrature.

``quad_eval`` is the brute-force reference every Mellin-side method is
checked against, so it deliberately shares no code with them.

All variants are integrated in ``y = log x``.  Both classical substitutions
(``t = x**-rho`` near the origin, ``u = x**delta`` in the tail) are linear
in ``y``, and in ``y`` the log-integrand

    h(y) = alpha*y + log K(e**y) - b*e**(-rho*y)

is concave for every variant, so there is exactly one peak to split at.
"""
import enum
import math
from dataclasses import dataclass, replace

from scipy import integrate, optimize

from .errors import ConvergenceError, DomainError

_DBL_EPS = 2.0 ** -52
_TINY = math.ulp(0.0)
_LOG_TINY = math.log(_TINY)
# exp(-LOG_CUT) relative to the peak is far below double resolution
LOG_CUT = 75.0


class Variant(str, enum.Enum):
    I1 = "i1"
    I2 = "i2"
    I1BETA = "i1beta"
    I2BETA = "i2beta"


class Method(str, enum.Enum):
    QUADRATURE = "quadrature"
    MELLIN_BARNES = "mellin_barnes"
    RESIDUE_SERIES = "residue_series"


@dataclass(frozen=True)
class EvalResult:
    value: float
    abs_error_estimate: float
    method: Method
    work: int
    imag_part: float = 0.0

    def __post_init__(self):
        for name in ("value", "abs_error_estimate", "imag_part"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "work", int(self.work))
        object.__setattr__(self, "method", Method(self.method))
        if not (math.isfinite(self.value) and math.isfinite(self.abs_error_estimate)):
            raise ConvergenceError(f"non-finite result {self.value!r} +/- {self.abs_error_estimate!r}")
        if self.abs_error_estimate < 0:
            raise ValueError("abs_error_estimate must be non-negative")

    def scaled(self, factor):
        return replace(self, value=self.value * factor,
                       abs_error_estimate=self.abs_error_estimate * abs(factor))


@dataclass(frozen=True)
class IntegralSpec:
    """Parameters of one integral.

    ``b = 0`` is accepted as a degenerate case (pure gamma/beta integral).
    ``cutoff`` is required for I2; for I2beta it is derived as
    ``(1/(a(1-beta)))**(1/delta)`` and may be omitted.
    """

    variant: Variant
    alpha: float
    a: float
    b: float
    delta: float
    rho: float
    beta: float = None
    cutoff: float = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        for name in ("alpha", "a", "delta", "rho"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")
        if not (math.isfinite(self.b) and self.b >= 0):
            raise DomainError(f"b must be non-negative, got {self.b!r}")
        v = self.variant
        if v in (Variant.I1BETA, Variant.I2BETA):
            if self.beta is None or not math.isfinite(self.beta):
                raise DomainError(f"{v.value} needs a finite beta")
            if v is Variant.I1BETA and not self.beta > 1:
                raise DomainError(f"i1beta needs beta > 1, got {self.beta!r}")
            if v is Variant.I2BETA and not self.beta < 1:
                raise DomainError(f"i2beta needs beta < 1, got {self.beta!r}")
        if v is Variant.I2:
            if self.cutoff is None or not (math.isfinite(self.cutoff) and self.cutoff > 0):
                raise DomainError("i2 needs a finite positive cutoff")
        elif v is Variant.I2BETA:
            d = (1.0 / (self.a * (1.0 - self.beta))) ** (1.0 / self.delta)
            if self.cutoff is not None and not math.isclose(self.cutoff, d, rel_tol=1e-12):
                raise DomainError(f"i2beta cutoff is fixed at {d!r}, got {self.cutoff!r}")
            object.__setattr__(self, "cutoff", d)
        elif self.cutoff is not None:
            raise DomainError(f"{v.value} takes no cutoff")

    def with_(self, **changes):
        if "beta" in changes or "a" in changes or "delta" in changes:
            if self.variant is Variant.I2BETA:
                changes.setdefault("cutoff", None)
        return replace(self, **changes)

    @property
    def gamma_exponent(self):
        """1/(beta-1) for I1beta, 1/(1-beta) for I2beta."""
        if self.variant is Variant.I1BETA:
            return 1.0 / (self.beta - 1.0)
        if self.variant is Variant.I2BETA:
            return 1.0 / (1.0 - self.beta)
        return None

    @property
    def kernel_coefficient(self):
        """a, a(beta-1) or a(1-beta): the coefficient of x**delta in the kernel."""
        if self.variant is Variant.I1BETA:
            return self.a * (self.beta - 1.0)
        if self.variant is Variant.I2BETA:
            return self.a * (1.0 - self.beta)
        return self.a

    def check_convergent(self):
        # the power-law tail x**(alpha - 1 - delta/(beta-1)) must be integrable
        if self.variant is Variant.I1BETA and not self.alpha * (self.beta - 1.0) < self.delta:
            raise DomainError(
                f"i1beta diverges at infinity unless alpha*(beta-1) < delta "
                f"(alpha={self.alpha}, beta={self.beta}, delta={self.delta})"
            )


def _softplus(t):
    return t + math.log1p(math.exp(-t)) if t > 30.0 else math.log1p(math.exp(t))


def _exp(t):
    return math.exp(min(t, 700.0))


def _log_kernel(spec, y):
    v = spec.variant
    if v is Variant.I1 or v is Variant.I2:
        return -spec.a * _exp(spec.delta * y)
    t = math.log(spec.kernel_coefficient) + spec.delta * y
    if v is Variant.I1BETA:
        return -spec.gamma_exponent * _softplus(t)
    if t >= 0.0:
        return -math.inf
    return spec.gamma_exponent * math.log(-math.expm1(t))


def _barrier(spec, y):
    if spec.b == 0.0:
        return 0.0
    return spec.b * _exp(-spec.rho * y)


def _log_integrand_y(spec, y):
    return spec.alpha * y + _log_kernel(spec, y) - _barrier(spec, y)


def _dlog_integrand_y(spec, y):
    v = spec.variant
    d = spec.alpha + spec.rho * _barrier(spec, y)
    if v is Variant.I1 or v is Variant.I2:
        return d - spec.a * spec.delta * _exp(spec.delta * y)
    c = spec.kernel_coefficient
    if v is Variant.I1BETA:
        return d - spec.a * spec.delta / (_exp(-spec.delta * y) + c)
    t = math.log(c) + spec.delta * y
    if t >= 0.0:
        return -math.inf
    return d - spec.a * spec.delta * _exp(spec.delta * y) / (-math.expm1(t))


def _expm1mx(x):
    """exp(x) - 1 - x without cancellation near 0."""
    if abs(x) >= 0.5:
        return math.expm1(x) - x if x < 700.0 else math.inf
    term = 0.5 * x * x
    total = term
    k = 2
    while abs(term) > 1e-18 * abs(total):
        k += 1
        term *= x / k
        total += term
    return total


def _log1pmx(u):
    """log(1 + u) - u without cancellation near 0."""
    if u <= -1.0:
        return -math.inf
    if abs(u) >= 0.5:
        return math.log1p(u) - u
    # log1p(u) = 2 atanh(r) with r = u/(2+u), and 2r - u = -u^2/(2+u)
    r = u / (2.0 + u)
    r2 = r * r
    power = r * r2
    acc = 0.0
    k = 3
    while abs(power) > 1e-18 * max(abs(acc), 1e-300) or k == 3:
        acc += power / k
        power *= r2
        k += 2
        if power == 0.0:
            break
    return -u * u / (2.0 + u) + 2.0 * acc


def _scaled_expm1mx(log_scale, x):
    """exp(log_scale) * (exp(x) - 1 - x), safe when the scale under- or overflows."""
    if x > 30.0:
        big = log_scale + x
        return math.inf if big > 709.0 else math.exp(big) - math.exp(log_scale) * (1.0 + x)
    return math.exp(log_scale) * _expm1mx(x) if log_scale < 709.0 else math.inf


def _logistic(t):
    return 1.0 / (1.0 + math.exp(-t)) if t >= 0 else math.exp(t) / (1.0 + math.exp(t))


def _shifted_log_integrand(spec, y0):
    """t -> h(y0 + t) - h(y0), evaluated without the cancellation of the direct difference.

    h(y0 + t) - h(y0) = h'(y0) t + R_kernel(t) + R_barrier(t), where both
    remainders are concave, vanish to second order at t = 0 and are computed
    from expm1(x) - x and log1p(u) - u.  The direct difference loses about
    log10(b x0**-rho) digits at the peak x0, which is many once b is large.
    """
    v = spec.variant
    g1 = _dlog_integrand_y(spec, y0)
    d, r = spec.delta, spec.rho
    log_b = math.log(spec.b) - r * y0 if spec.b > 0 else None

    if v is Variant.I1 or v is Variant.I2:
        log_a = math.log(spec.a) + d * y0
        kernel = lambda t: -_scaled_expm1mx(log_a, d * t)
    elif v is Variant.I1BETA:
        gam = spec.gamma_exponent
        t0 = math.log(spec.kernel_coefficient) + d * y0
        # softplus remainder, written around whichever side of t0 = 0 keeps w <= 1/2
        sgn = 1.0 if t0 < 0 else -1.0
        w = _logistic(sgn * t0)

        def kernel(t):
            # log1p(w (e^x - 1)) - w x, which is the softplus remainder in either orientation
            x = sgn * d * t
            if abs(x) < 1.0:
                return -gam * (_log1pmx(w * math.expm1(x)) + w * _expm1mx(x))
            if x > 30.0:
                return -gam * (x + math.log(w + (1.0 - w) * math.exp(-x)) - w * x)
            return -gam * (math.log1p(w * math.expm1(x)) - w * x)
    else:
        gam = spec.gamma_exponent
        t0 = math.log(spec.kernel_coefficient) + d * y0
        kappa = 1.0 / math.expm1(-t0) if t0 < 0 else math.inf

        def kernel(t):
            x = d * t
            if t0 + x >= 0.0:
                return -math.inf
            if x > 700.0:
                return -math.inf
            return gam * (_log1pmx(-kappa * math.expm1(x)) - kappa * _expm1mx(x))

    def h(t):
        out = g1 * t + kernel(t)
        if log_b is not None:
            out -= _scaled_expm1mx(log_b, -r * t)
        return out

    return h


def integrand(spec, x):
    """x**(alpha-1) * K(x) * exp(-b x**-rho) for x in the support."""
    if not x > 0:
        raise DomainError(f"integrand needs x > 0, got {x!r}")
    if spec.cutoff is not None and x > spec.cutoff:
        raise DomainError(f"x={x!r} lies beyond the cutoff {spec.cutoff!r}")
    y = math.log(x)
    if spec.variant is Variant.I2BETA and x == spec.cutoff:
        return 0.0
    return math.exp(_log_integrand_y(spec, y) - y)


def _upper_limit_y(spec):
    return math.log(spec.cutoff) if spec.cutoff is not None else math.inf


def _peak(spec):
    """Location of the maximum of h(y), clamped to the support."""
    y_end = _upper_limit_y(spec)
    f = lambda y: _dlog_integrand_y(spec, y)
    hi = min(0.0, y_end - 1e-3) if math.isfinite(y_end) else 0.0
    if math.isfinite(y_end):
        edge = y_end - 1e-12 * max(1.0, abs(y_end))
        if f(edge) > 0:
            # the peak is squeezed against the cutoff, where h' -> -inf; bisect on floats
            lo, hi = edge, y_end
            while math.nextafter(lo, hi) < hi:
                mid = 0.5 * (lo + hi)
                if mid in (lo, hi):
                    break
                if f(mid) > 0:
                    lo = mid
                else:
                    hi = mid
            return lo
    step = 1.0
    lo = hi
    while f(lo) <= 0:
        lo -= step
        step *= 2.0
        if step > 1e6:
            raise ConvergenceError("could not bracket the integrand peak from the left")
    step = 1.0
    while f(hi) > 0:
        nxt = hi + step
        if nxt >= y_end:
            hi = 0.5 * (hi + y_end)
        else:
            hi = nxt
            step *= 2.0
        if step > 1e6:
            raise ConvergenceError("could not bracket the integrand peak from the right")
    if lo > hi:
        lo, hi = hi, lo
    return optimize.brentq(f, lo, hi, xtol=1e-14, rtol=4 * _DBL_EPS, maxiter=200)


def _width(spec, y0):
    step = 1e-4 * max(1.0, abs(y0))
    y_end = _upper_limit_y(spec)
    if y0 + step >= y_end:
        y1, y2 = y0 - 2 * step, y0
    else:
        y1, y2 = y0 - step, y0 + step
    curv = (_dlog_integrand_y(spec, y2) - _dlog_integrand_y(spec, y1)) / (y2 - y1)
    if not (curv < 0 and math.isfinite(curv)):
        return 1.0
    return min(max(1.0 / math.sqrt(-curv), 1e-8), 1e3)


def _edges(spec, y0, dh, w, direction):
    """Geometric breakpoints from the peak out to where h drops by LOG_CUT."""
    y_end = _upper_limit_y(spec)
    edges = [y0]
    k = 0
    while True:
        y = y0 + direction * w * 2.0 ** k
        if direction > 0 and y >= y_end:
            if y0 < y_end:
                edges.append(y_end)
            return edges
        edges.append(y)
        if dh(y - y0) < -LOG_CUT:
            return edges
        k += 1
        if k > 60:
            raise ConvergenceError("integrand tail does not decay")


def quad_eval(spec, rel_tol=1e-10):
    """Adaptive quadrature of the integral described by ``spec``.

    The y-axis is cut at the integrand's peak and at geometrically spaced
    breakpoints on either side; each piece goes to QUADPACK (``scipy.integrate.quad``).
    Raises ConvergenceError when the combined error estimate stays above
    the requested tolerance.
    """
    if not 1e-13 <= rel_tol <= 1e-2:
        raise DomainError(f"rel_tol must lie in [1e-13, 1e-2], got {rel_tol!r}")
    spec.check_convergent()
    y0 = _peak(spec)
    h0 = _log_integrand_y(spec, y0)
    w = _width(spec, y0)
    dh = _shifted_log_integrand(spec, y0)
    g = lambda y: math.exp(dh(y - y0))

    left = _edges(spec, y0, dh, w, -1)[::-1]
    right = _edges(spec, y0, dh, w, +1)
    edges = left + right[1:]
    # below the smallest subnormal even at peak height over the whole span: exactly 0 in doubles
    if h0 + math.log(edges[-1] - edges[0]) < _LOG_TINY:
        return EvalResult(0.0, _TINY, Method.QUADRATURE, 0)
    total = 0.0
    err = 0.0
    work = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        out = integrate.quad(g, lo, hi, epsabs=1e-3 * rel_tol * w, epsrel=0.1 * rel_tol,
                             limit=200, full_output=1)
        total += out[0]
        err += out[1]
        work += out[2]["neval"]
    if not total > 0:
        raise ConvergenceError("quadrature returned a non-positive value")
    if err > rel_tol * total:
        raise ConvergenceError(
            f"quadrature error estimate {err / total:.3g} (relative) exceeds rel_tol={rel_tol:.3g}"
        )
    if h0 > 709.0:
        raise ConvergenceError("integral overflows double precision")
    # rounding in h0 itself propagates as a relative error on the whole integral
    scale = abs(spec.alpha * y0) + abs(_log_kernel(spec, y0)) + _barrier(spec, y0) + 1.0
    scale_factor = math.exp(h0)
    value = total * scale_factor
    floor = 8.0 * _DBL_EPS * scale * value
    return EvalResult(value, err * scale_factor + floor, Method.QUADRATURE, work)


def tsallis_derivative_residual(alpha0, a, beta, x):
    """|f'(x) + a f(x)**beta| for f(x) = x**alpha0 [1 - a(1-beta)x]**(1/(1-beta)).

    For alpha0 = 0 this vanishes identically.  f' is taken by the complex-step
    rule, so the result does not depend on a hand-derived derivative.
    """
    if not beta < 1:
        raise DomainError("the bounded power kernel needs beta < 1")
    c = a * (1.0 - beta)
    end = 1.0 / c
    if not 0 < x < end:
        raise DomainError(f"x={x!r} lies outside the support (0, {end!r})")
    p = 1.0 / (1.0 - beta)

    def f(t):
        return t ** alpha0 * (1.0 - c * t) ** p

    step = 1e-20 * max(1.0, abs(x))
    deriv = f(complex(x, step)).imag / step
    return abs(deriv + a * f(x) ** beta)
