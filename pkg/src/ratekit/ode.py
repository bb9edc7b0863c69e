"""Differential equations satisfied by the reduced integrals.

With eta = z d/dz, a Meijer-G function G^{m,n}_{p,q} is annihilated by

    L = sign * z * prod_j (eta - u_j) - prod_j (eta - b_j),

where ``sign = (-1)**(p - m - n)`` and ``u_j = a_j - 1``.  Two independent
checks are offered: the exact Mellin-side identity (pure gamma algebra) and
finite differences in ``t = log z`` applied to quadrature values.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidInput, StepTooSmall
from .integrals import Variant, quad_eval
from .representations import integer_ratio, reduce


@dataclass(frozen=True)
class GOperator:
    sign: int
    upper_shifts: tuple
    lower_shifts: tuple
    m_order: int = field(default=-1)

    def __post_init__(self):
        object.__setattr__(self, "upper_shifts", tuple(float(u) for u in self.upper_shifts))
        object.__setattr__(self, "lower_shifts", tuple(float(b) for b in self.lower_shifts))
        if self.m_order == -1:
            object.__setattr__(self, "m_order", len(self.lower_shifts))
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.m_order != len(self.lower_shifts):
            raise ValueError("m_order must equal the number of lower shifts")
        if len(self.upper_shifts) >= len(self.lower_shifts):
            raise ValueError("need fewer upper than lower factors")

    def perturbed(self, eps):
        """Copy with every lower shift moved by ``eps`` (negative controls)."""
        return GOperator(self.sign, self.upper_shifts, tuple(b + eps for b in self.lower_shifts))


def operator_from_theorem(spec):
    """Operator for ``spec`` written straight from the closed-form statements.

    I1:      (-1)**(m+1) z f - eta(eta - 1/m)...(eta - (m-1)/m)(eta - e) f = 0
    I1beta:  same sign, z-term factor (eta + 1/(beta-1) - e)
    I2beta:  sign (-1)**m, z-term factor (eta - 1/(1-beta) - e)

    with e = alpha/delta = alpha/(m rho).
    """
    if spec.variant is Variant.I2:
        raise InvalidInput("i2 with a generic cutoff has no G-function ODE")
    m = integer_ratio(spec)
    e = spec.alpha / spec.delta
    lower = tuple(k / m for k in range(m)) + (e,)
    if spec.variant is Variant.I1:
        return GOperator((-1) ** (m + 1), (), lower)
    if spec.variant is Variant.I1BETA:
        return GOperator((-1) ** (m + 1), (e - 1.0 / (spec.beta - 1.0),), lower)
    return GOperator((-1) ** m, (e + 1.0 / (1.0 - spec.beta),), lower)


def operator_from_meijer(g):
    """Generic operator of G^{m,n}_{p,q}: upper shifts a_j - 1, lower shifts b_j."""
    return GOperator(g.sign, tuple(complex(a).real - 1.0 for a in g.upper),
                     tuple(complex(b).real for b in g.lower))


def mellin_operator_identity(op, g, s_samples):
    """Max relative residual of sign*phi(s+1)*prod(-a_j - s) = phi(s)*prod(-b_j - s).

    ``phi`` is the G integrand of ``g``; the operator supplies a_j = u_j + 1
    and b_j.  Divided through by phi(s) prod(-b_j - s), the two sides agree
    exactly when L annihilates G.
    """
    phi = g.to_integrand()
    s = np.asarray(list(s_samples), dtype=complex)
    ratio = np.exp(phi.log_phi(s + 1.0) - phi.log_phi(s))
    up = np.ones_like(s)
    for u in op.upper_shifts:
        up *= -(u + 1.0) - s
    low = np.ones_like(s)
    for b in op.lower_shifts:
        low *= -b - s
    res = np.abs(op.sign * ratio * up - low) / np.abs(low)
    return float(res.max())


# --- finite differences ------------------------------------------------------

def fd_weights(offsets, order):
    """Exact finite-difference weights (Fornberg) for the ``order``-th derivative
    at 0 from samples at integer ``offsets``, unit spacing."""
    xs = [Fraction(x) for x in offsets]
    n = len(xs)
    c = [[Fraction(0)] * n for _ in range(order + 1)]
    c[0][0] = Fraction(1)
    c1 = Fraction(1)
    for i in range(1, n):
        c2 = Fraction(1)
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            for k in range(min(i, order), -1, -1):
                prev_i = c[k - 1][i - 1] if k else Fraction(0)
                c[k][i] = c1 * (k * prev_i - xs[i - 1] * c[k][i - 1]) / c2
            for k in range(min(i, order), -1, -1):
                prev_j = c[k - 1][j] if k else Fraction(0)
                c[k][j] = (xs[i] * c[k][j] - k * prev_j) / c3
        c1 = c2
    return np.array([float(w) for w in c[order]])


def central_fd_order(stencil_points, derivative):
    """Truncation order of the centred ``stencil_points`` rule for a derivative."""
    return 2 * ((stencil_points - derivative + 1) // 2)


def expected_fd_order(op, stencil_points):
    """Leading truncation order of L applied by centred differences."""
    return min(central_fd_order(stencil_points, k) for k in range(1, op.m_order + 1))


@dataclass(frozen=True)
class OdeProbe:
    z_points: tuple
    fd_step: float = 1e-2
    stencil_points: int = 7

    def __post_init__(self):
        object.__setattr__(self, "z_points", tuple(float(z) for z in self.z_points))
        if any(not z > 0 for z in self.z_points):
            raise ValueError("z points must be positive")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")
        if self.stencil_points < 3 or self.stencil_points % 2 == 0:
            raise ValueError("stencil_points must be odd and >= 3")


def scaled_integral(spec, rel_tol=1e-13):
    """f(z) = I(b(z)) / prefactor with b = (m**m z / c)**(1/m); returns (f, rel_err)."""
    form = reduce(spec)
    m = form.m
    c = spec.kernel_coefficient
    inv = math.exp(-form.log_prefactor)

    def f(z):
        b = (m ** m * z / c) ** (1.0 / m)
        res = quad_eval(spec.with_(b=b), rel_tol)
        return res.value * inv, res.abs_error_estimate / abs(res.value)

    return f


def _apply(op, z, h, values, stencil_points, rel_noise):
    r = stencil_points // 2
    offsets = range(-r, r + 1)
    q = op.m_order
    derivs = []
    noise_gain = []
    for k in range(q + 1):
        w = fd_weights(offsets, k) / h ** k
        derivs.append(float(np.dot(w, values)))
        noise_gain.append(float(np.abs(w).sum()))
    up = np.poly(op.upper_shifts) if op.upper_shifts else np.array([1.0])
    low = np.poly(op.lower_shifts)
    # np.poly lists the highest power first
    up_term = op.sign * z * sum(cf * derivs[k] for k, cf in enumerate(up[::-1]))
    low_term = sum(cf * derivs[k] for k, cf in enumerate(low[::-1]))
    scale = abs(up_term) + abs(low_term)
    if scale == 0.0:
        return 0.0
    fmax = float(np.max(np.abs(values)))
    noise = rel_noise * fmax * (
        z * sum(abs(cf) * noise_gain[k] for k, cf in enumerate(up[::-1]))
        + sum(abs(cf) * noise_gain[k] for k, cf in enumerate(low[::-1])))
    if noise > 0.1 * scale:
        raise StepTooSmall(
            f"finite-difference noise {noise:.2e} swamps the operator scale {scale:.2e} "
            f"at h={h!r}; use a larger step")
    return float(abs(up_term - low_term) / scale)


def fd_residual(op, spec, probe, f=None):
    """Relative residual |Lf| / (|z-term| + |eta-term|) at each probe point.

    ``f`` defaults to the scaled quadrature value of ``spec``; pass any
    callable z -> value (or z -> (value, rel_err)) to test another function.
    """
    if f is None:
        f = scaled_integral(spec)
    r = probe.stencil_points // 2
    out = []
    for z in probe.z_points:
        vals, rel = [], 0.0
        for j in range(-r, r + 1):
            v = f(z * math.exp(j * probe.fd_step))
            if isinstance(v, tuple):
                v, e = v
                rel = max(rel, e)
            vals.append(v)
        rel = max(rel, 2.0 ** -52)
        out.append(_apply(op, z, probe.fd_step, np.array(vals), probe.stencil_points, rel))
    return out


@dataclass(frozen=True)
class RefinementStudy:
    steps: tuple
    residuals: tuple
    slope: float
    expected_order: int

    @property
    def slope_ok(self):
        return abs(self.slope - self.expected_order) <= 0.3 * self.expected_order


def fd_refinement(op, spec, z, steps=(0.4, 0.2, 0.1, 0.05), stencil_points=7):
    """Residual at ``z`` for decreasing steps and the fitted log-log slope."""
    f = scaled_integral(spec)
    res = [fd_residual(op, spec, OdeProbe((z,), h, stencil_points), f)[0] for h in steps]
    slope = float(np.polyfit(np.log(steps), np.log(res), 1)[0])
    return RefinementStudy(tuple(float(h) for h in steps), tuple(res), slope, expected_fd_order(op, stencil_points))
