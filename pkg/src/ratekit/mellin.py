"""Inverse-Mellin (Barnes) integrals: vertical-line quadrature and residue sums.

A Barnes integrand is a ratio of gamma factors times ``base**-s``::

    phi(s) = prod Gamma(c_i + k_i s) * prod Gamma(c_j - k_j s)
             / (prod Gamma(d_i + l_i s) * prod Gamma(d_j - l_j s))

The Meijer-G function is the special case with all scales equal to one.
"""
import collections
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import _dd
from .errors import (CoincidentPoleError, ContourError, DivergenceError,
                     TruncationError, UnsupportedShape, UnsupportedVariant)
from .gamma import log_gamma, log_gamma_array
from .integrals import EvalResult, Method, Variant

_DBL_EPS = 2.0 ** -52
COINCIDENT_TOL = 1e-9
# trapezoid discretisation error ~ exp(-2*pi*d/h); keep the exponent at this value
_TRAPEZOID_EXPONENT = 45.0
# integrand magnitudes below exp(-_TAIL_CUT) of the peak are dropped
_TAIL_CUT = 42.0
_MAX_NODES = 4_000_001


def _pairs(items):
    return tuple((complex(shift), float(scale)) for shift, scale in items)


@dataclass(frozen=True)
class MellinIntegrand:
    """``exp(log_prefactor) * phi(s) * base**-s`` as gamma factor lists.

    Each factor is a ``(shift, scale)`` pair: ``num_gammas`` and
    ``den_gammas`` stand for Gamma(shift + scale*s), ``reflected_gammas``
    and ``den_reflected_gammas`` for Gamma(shift - scale*s).
    """

    num_gammas: tuple
    den_gammas: tuple = ()
    reflected_gammas: tuple = ()
    base: float = 1.0
    log_prefactor: float = 0.0
    den_reflected_gammas: tuple = ()

    def __post_init__(self):
        for name in ("num_gammas", "den_gammas", "reflected_gammas", "den_reflected_gammas"):
            pairs = _pairs(getattr(self, name))
            if any(not scale > 0 for _, scale in pairs):
                raise ValueError(f"{name}: all gamma scales must be positive")
            object.__setattr__(self, name, pairs)
        if not self.base > 0:
            raise ValueError("base must be positive")

    @property
    def prefactor(self):
        return math.exp(self.log_prefactor)

    @property
    def decay_mass(self):
        """sum of scales(num) - sum of scales(den); integrand ~ exp(-pi/2 * mass * |t|)."""
        pos = sum(k for _, k in self.num_gammas) + sum(k for _, k in self.reflected_gammas)
        neg = sum(k for _, k in self.den_gammas) + sum(k for _, k in self.den_reflected_gammas)
        return pos - neg

    @property
    def left_pole_edge(self):
        """Rightmost pole of the Gamma(c + k s) factors (-inf if none)."""
        return max((-c.real / k for c, k in self.num_gammas), default=-math.inf)

    @property
    def right_pole_edge(self):
        """Leftmost pole of the Gamma(c - k s) factors (+inf if none)."""
        return min((c.real / k for c, k in self.reflected_gammas), default=math.inf)

    def log_phi(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.zeros_like(s)
        for c, k in self.num_gammas:
            out += log_gamma_array(c + k * s)
        for c, k in self.reflected_gammas:
            out += log_gamma_array(c - k * s)
        for c, k in self.den_gammas:
            out -= log_gamma_array(c + k * s)
        for c, k in self.den_reflected_gammas:
            out -= log_gamma_array(c - k * s)
        return out

    def log_integrand(self, s):
        s = np.asarray(s, dtype=complex)
        return self.log_prefactor + self.log_phi(s) - s * math.log(self.base)


@dataclass(frozen=True)
class MeijerGParams:
    """G^{m,n}_{p,q}(z | upper; lower)."""

    m: int
    n: int
    p: int
    q: int
    upper: tuple
    lower: tuple
    z: float

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(self.upper))
        object.__setattr__(self, "lower", tuple(self.lower))
        if len(self.upper) != self.p or len(self.lower) != self.q:
            raise ValueError("parameter list lengths must equal p and q")
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise ValueError("need 0 <= m <= q and 0 <= n <= p")
        if not self.z > 0:
            raise ValueError("z must be positive")
        for bj in self.lower[: self.m]:
            for ak in self.upper[: self.n]:
                gap = complex(1 - ak + bj)
                if abs(gap.imag) < COINCIDENT_TOL and gap.real <= COINCIDENT_TOL and \
                        abs(gap.real - round(gap.real)) < COINCIDENT_TOL:
                    raise ContourError(
                        f"pole of Gamma({bj} + s) meets pole of Gamma(1 - {ak} - s); "
                        "no separating contour exists")

    @property
    def sign(self):
        return -1 if (self.p - self.m - self.n) % 2 else 1

    def to_integrand(self, log_prefactor=0.0):
        return MellinIntegrand(
            num_gammas=[(b, 1.0) for b in self.lower[: self.m]],
            reflected_gammas=[(1 - a, 1.0) for a in self.upper[: self.n]],
            den_gammas=[(a, 1.0) for a in self.upper[self.n:]],
            den_reflected_gammas=[(1 - b, 1.0) for b in self.lower[self.m:]],
            base=self.z,
            log_prefactor=log_prefactor,
        )


@dataclass(frozen=True)
class ContourConfig:
    """Vertical line Re s = c, truncated to |Im s| <= half_height, with ``nodes`` points."""

    c: float
    half_height: float
    nodes: int

    def __post_init__(self):
        if not self.half_height > 0:
            raise ValueError("half_height must be positive")
        if self.nodes < 3:
            raise ValueError("need at least 3 nodes")
        if self.nodes % 2 == 0:
            object.__setattr__(self, "nodes", self.nodes + 1)

    @property
    def step(self):
        return 2.0 * self.half_height / (self.nodes - 1)


def default_abscissa(phi):
    """Abscissa of the integration line.

    Starts 0.75 right of the rightmost left pole (and never left of 0.75),
    or at the middle of the gap when right poles crowd in.  From there the
    line moves right toward the real-axis saddle of |phi(c) base**-c| as far
    as the right poles allow: when G is exponentially small the integrand
    on the default line is many orders of magnitude larger than the result,
    and that cancellation costs digits.
    """
    lo = phi.left_pole_edge
    hi = phi.right_pole_edge
    c0 = max(0.0, lo) + 0.75 if math.isfinite(lo) else 0.75
    if math.isfinite(hi) and not c0 < hi - min(0.75, 0.5 * (hi - lo)):
        return 0.5 * (lo + hi) if math.isfinite(lo) else hi - 0.75
    f = lambda c: float(phi.log_integrand(complex(c, 0.0)).real)
    if math.isfinite(hi):
        c_hi = hi - min(0.75, 0.5 * (hi - c0))
    else:
        # no right poles: widen until the log-magnitude turns upward (saddle bracketed)
        c_hi = c0 + 200.0
        while f(c_hi + 1.0) < f(c_hi) and c_hi < 1e7:
            c_hi = c0 + 2.0 * (c_hi - c0)
    if not c_hi > c0:
        return c0
    f0 = f(c0)
    res = optimize.minimize_scalar(f, bounds=(c0, c_hi), method="bounded",
                                   options={"xatol": 1e-3})
    # only worth moving for a real gain; keeps the usual c = 0.75 otherwise
    if res.success and res.fun < f0 - 2.0:
        return float(res.x)
    return c0


def _check_line(phi, c):
    lo, hi = phi.left_pole_edge, phi.right_pole_edge
    if not lo < c < hi:
        raise ContourError(f"abscissa c={c!r} does not separate left poles (<= {lo!r}) "
                           f"from right poles (>= {hi!r})")


def auto_contour(phi, c=None):
    """Pick step and truncation for ``phi`` on the line Re s = c."""
    if c is None:
        c = default_abscissa(phi)
    _check_line(phi, c)
    if not phi.decay_mass > 0:
        raise TruncationError("integrand does not decay along vertical lines")
    d = min(c - phi.left_pole_edge, phi.right_pole_edge - c)
    h = min(0.25, 2.0 * math.pi * 0.9 * d / _TRAPEZOID_EXPONENT)

    # scan outward in |t| until the log-magnitude has dropped by _TAIL_CUT
    t_max = 0.0
    chunk = np.arange(0.0, 64.0, 0.5)
    ref = float(phi.log_integrand(complex(c, 0.0)).real)
    offset = 0.0
    peak = ref
    while True:
        t = offset + chunk
        mag = np.maximum(phi.log_integrand(c + 1j * t).real, phi.log_integrand(c - 1j * t).real)
        peak = max(peak, float(mag.max()))
        below = np.nonzero(mag < peak - _TAIL_CUT)[0]
        if below.size and np.all(mag[below[0]:] < peak - _TAIL_CUT):
            t_max = float(t[below[0]])
            break
        offset += chunk[-1] + 0.5
        if offset > 1e5:
            raise TruncationError("integrand decays too slowly to truncate")
    t_max = max(t_max, 4.0)
    nodes = 2 * math.ceil(t_max / h) + 1
    if nodes > _MAX_NODES:
        raise TruncationError(f"contour would need {nodes} nodes")
    return ContourConfig(c=c, half_height=t_max, nodes=nodes)


def contour_eval(phi, cfg=None):
    """(1/2 pi) * integral over [-T, T] of phi(c + it) base**-(c + it) dt.

    Trapezoid rule on a uniform grid (exponentially convergent for integrands
    analytic in a strip).  The value returned is the real part; the imaginary
    part, the step-halving difference and the truncated tail all go into the
    error estimate.
    """
    if cfg is None:
        cfg = auto_contour(phi)
    _check_line(phi, cfg.c)
    t = np.linspace(-cfg.half_height, cfg.half_height, cfg.nodes)
    h = cfg.step
    logf = phi.log_integrand(cfg.c + 1j * t)
    f = np.exp(logf)
    absf = np.abs(f)

    w = np.full(cfg.nodes, h)
    w[0] = w[-1] = 0.5 * h
    total = np.sum(w * f) / (2.0 * math.pi)
    coarse = f[::2]
    w2 = np.full(coarse.size, 2.0 * h)
    w2[0] = w2[-1] = h
    total_coarse = np.sum(w2 * coarse) / (2.0 * math.pi)

    value = float(total.real)
    peak = float(absf.max())
    edge = max(absf[0], absf[-1])
    if edge > 1e-15 * peak:
        raise TruncationError(
            f"integrand at |t|=T is {edge / peak:.2e} of its peak; increase half_height")
    diff = abs(total - total_coarse)
    disc = min(diff, 10.0 * diff * diff / abs(value)) if value != 0 else diff
    decay = 0.5 * math.pi * phi.decay_mass
    tail = 2.0 * edge / decay / (2.0 * math.pi)
    # each node's log carries rounding in proportion to the size of the terms summed into it
    s = cfg.c + 1j * t
    log_terms = abs(phi.log_prefactor) + np.abs(logf - phi.log_prefactor + s * math.log(phi.base)) \
        + np.abs(s) * abs(math.log(phi.base))
    rounding = 16.0 * _DBL_EPS * float(np.sum(w * absf * (1.0 + log_terms))) / (2.0 * math.pi)
    err = disc + tail + rounding + abs(float(total.imag))
    return EvalResult(value, err, Method.MELLIN_BARNES, cfg.nodes, imag_part=float(total.imag))


# --- residue series -------------------------------------------------------

def _is_real(g):
    return all(complex(v).imag == 0 for v in g.upper + g.lower)


def _check_series_shape(g):
    if g.n > 1 or g.p > 1:
        raise UnsupportedShape(f"residue series supports n <= 1, p <= 1; got n={g.n}, p={g.p}")
    if not g.q > g.p:
        raise UnsupportedShape("residue series needs q > p")
    if g.m < 1:
        raise UnsupportedShape("residue series needs m >= 1")
    lower = [complex(b) for b in g.lower[: g.m]]
    for i in range(len(lower)):
        for j in range(i + 1, len(lower)):
            d = lower[i] - lower[j]
            if abs(d.imag) < COINCIDENT_TOL and abs(d.real - round(d.real)) < COINCIDENT_TOL:
                raise CoincidentPoleError(
                    f"lower parameters {g.lower[i]} and {g.lower[j]} differ by an integer")


def _nonpositive_int(x):
    x = complex(x)
    return abs(x.imag) < 1e-13 and x.real <= 0.5 and abs(x.real - round(x.real)) < 1e-13


class _Family:
    """Residues of G at s = -b_j - k, k = 0, 1, ..., as a term recurrence.

    Gamma arguments are kept as tuples of float summands plus an integer
    offset so the double-double path can form them without rounding.
    """

    def __init__(self, g, j):
        bj = g.lower[j]
        self.bj = bj
        others = [b for i, b in enumerate(g.lower[: g.m]) if i != j]
        ups_num = g.upper[: g.n]     # Gamma(1 - a - s)
        ups_den = g.upper[g.n:]      # 1/Gamma(a + s)
        lows_den = g.lower[g.m:]     # 1/Gamma(1 - b - s)
        # (summands, sign of the log-gamma contribution) at k = 0
        self.first_args = ([((b, -bj), 1) for b in others]
                           + [((1.0, -a, bj), 1) for a in ups_num]
                           + [((1.0, -b, bj), -1) for b in lows_den]
                           + [((a, -bj), -1) for a in ups_den])
        # R_{k+1}/R_k = -z/(k+1) * prod(num + off) / prod(den + off), off = k or -(k+1)
        self.num = [((1.0, -a, bj), 0) for a in ups_num] + [((a, -bj), -1) for a in ups_den]
        self.den = [((b, -bj), -1) for b in others] + [((1.0, -b, bj), 0) for b in lows_den]
        self.vanishes = any(_nonpositive_int(a - bj) for a in ups_den) or \
            any(_nonpositive_int(1 - b + bj) for b in lows_den)


def _dd_sum(terms, offset=0):
    acc = _dd.DD(0.0)
    for t in terms:
        acc = acc + t
    return acc + offset


def _offset(kind, k):
    return k if kind == 0 else -(k + 1)


def _first_term_dd(fam, log_z, log_scale):
    total = _dd.DD(0.0)
    sign = 1.0
    for terms, power in fam.first_args:
        v, sg = _dd.lgamma(_dd_sum(terms))
        total = total + v if power > 0 else total - v
        sign *= sg
    return _dd.exp(total + log_z * fam.bj + log_scale) * sign


def _first_term_complex(fam, log_z, log_scale):
    total = log_scale + fam.bj * log_z
    for terms, power in fam.first_args:
        total += power * log_gamma(sum(terms))
    return complex(np.exp(total))


def _step_dd(fam, z, k):
    step = _dd.DD(-z) / (k + 1)
    for terms, kind in fam.num:
        step = step * _dd_sum(terms, _offset(kind, k))
    for terms, kind in fam.den:
        step = step / _dd_sum(terms, _offset(kind, k))
    return step


def _step_complex(fam, z, k):
    step = -z / (k + 1)
    for terms, kind in fam.num:
        step *= sum(terms) + _offset(kind, k)
    for terms, kind in fam.den:
        step /= sum(terms) + _offset(kind, k)
    return step


def residue_series_eval(g, max_terms=2000, rel_tol=None, log_scale=0.0):
    """Sum the residues of G at its left poles s = -b_j - k (simple poles only).

    Each pole family is generated by its rational term recurrence and stops
    once its last ten terms are below ``rel_tol`` of the family sum.  Real
    parameters are summed in double-double arithmetic: the families cancel
    heavily once z grows (by ~1e11 at z = 20 for the n = 1 shape), which
    plain doubles cannot absorb.  Complex parameters use doubles.
    ``log_scale`` is added to the log of each leading coefficient, so huge
    prefactors never materialise on their own.

    ``rel_tol`` is the per-family stopping threshold; it defaults to the
    working precision (1e-32 or 1e-17) since family sums can exceed the
    result by many orders of magnitude.
    """
    _check_series_shape(g)
    real = _is_real(g)
    z = float(g.z)
    if real:
        g = MeijerGParams(g.m, g.n, g.p, g.q,
                          tuple(complex(a).real for a in g.upper),
                          tuple(complex(b).real for b in g.lower), z)
        log_z = _dd.log(_dd.DD(z))
        work_eps = _dd.EPS
        first_term, step_of, total = _first_term_dd, _step_dd, _dd.DD(0.0)
        if rel_tol is None:
            rel_tol = 1e-32
    else:
        log_z = math.log(z)
        work_eps = _DBL_EPS
        first_term, step_of, total = _first_term_complex, _step_complex, 0j
        if rel_tol is None:
            rel_tol = 1e-17
    abs_sum = 0.0
    tail = 0.0
    work = 0
    for j in range(g.m):
        fam = _Family(g, j)
        if fam.vanishes:
            continue
        term = first_term(fam, log_z, log_scale)
        fam_sum = term
        fam_abs = abs(complex(term))
        recent = collections.deque([fam_abs], maxlen=10)
        for k in range(max_terms):
            term = term * step_of(fam, z, k)
            work += 1
            mag = abs(complex(term))
            if mag == 0.0:
                # a 1/Gamma factor hit a pole: the family terminates exactly
                recent.clear()
                break
            recent.append(mag)
            fam_sum = fam_sum + term
            fam_abs += mag
            if k >= 10 and sum(recent) <= rel_tol * abs(complex(fam_sum)):
                break
        else:
            raise DivergenceError(
                f"residue series for b={fam.bj} not converged after {max_terms} terms")
        total = total + fam_sum
        abs_sum += fam_abs
        tail += sum(recent)
    value = complex(total).real
    err = 8.0 * work_eps * (work + 10) * abs_sum + _DBL_EPS * abs(value) + tail
    return EvalResult(value, err, Method.RESIDUE_SERIES, work)


# --- integral families as Barnes integrands ----------------------------------

def integral_to_mellin(spec):
    """Barnes integrand of an integral family in its H-function form.

    I1:      phi = Gamma(s/rho) Gamma(alpha/delta + s/delta),
             base = a**(1/delta) b**(1/rho), prefactor 1/(delta rho a**(alpha/delta))
    I2beta:  extra 1/Gamma(alpha/delta + 1 + 1/(1-beta) + s/delta), c = a(1-beta),
             prefactor Gamma(1 + 1/(1-beta)) / (delta rho c**(alpha/delta))
    I1beta:  extra Gamma(1/(beta-1) - alpha/delta - s/delta), c = a(beta-1),
             prefactor 1 / (Gamma(1/(beta-1)) delta rho c**(alpha/delta))
    """
    v = spec.variant
    if v is Variant.I2:
        raise UnsupportedVariant("i2 with a generic cutoff has no Mellin-Barnes form")
    if spec.b <= 0:
        raise UnsupportedVariant("the Mellin-Barnes form needs b > 0")
    spec.check_convergent()
    e = spec.alpha / spec.delta
    c = spec.kernel_coefficient
    num = [(0.0, 1.0 / spec.rho), (e, 1.0 / spec.delta)]
    den = []
    refl = []
    log_pref = -math.log(spec.delta * spec.rho) - e * math.log(c)
    if v is Variant.I2BETA:
        gam = spec.gamma_exponent
        den.append((e + 1.0 + gam, 1.0 / spec.delta))
        log_pref += log_gamma(1.0 + gam).real
    elif v is Variant.I1BETA:
        gam = spec.gamma_exponent
        refl.append((gam - e, 1.0 / spec.delta))
        log_pref -= log_gamma(gam).real
    base = math.exp(math.log(c) / spec.delta + math.log(spec.b) / spec.rho)
    return MellinIntegrand(num_gammas=num, den_gammas=den, reflected_gammas=refl,
                           base=base, log_prefactor=log_pref)
