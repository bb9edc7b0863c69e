"""beta -> 1 limits of the pathway integrals.

As beta -> 1 from above the superstatistics kernel tends to exp(-a x**delta)
and I1beta -> I1.  From below the cutoff (1/(a(1-beta)))**(1/delta) runs
off to infinity, so I2beta also tends to the infinite-range I1.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedVariant
from .gamma import asymptotic_gamma_ratio
from .integrals import IntegralSpec, Variant, quad_eval


def pathway_spec(spec, beta):
    """The pathway counterpart of a classical spec: I1beta above 1, I2beta below."""
    if spec.variant not in (Variant.I1, Variant.I2):
        raise UnsupportedVariant("the base of a limit study must be i1 or i2")
    if beta == 1.0:
        raise DomainError("beta = 1 is the classical integral itself; the pathway kernel is undefined")
    variant = Variant.I1BETA if beta > 1.0 else Variant.I2BETA
    return IntegralSpec(variant, spec.alpha, spec.a, spec.b, spec.delta, spec.rho, beta=beta)


def classical_target(spec):
    # the cutoff grows without bound as beta -> 1, so the limit is the infinite-range I1
    return spec.with_(variant=Variant.I1, cutoff=None)


def pathway_gap(spec, beta, rel_tol=1e-12):
    """|I_beta - I1| computed by quadrature on both sides."""
    target = quad_eval(classical_target(spec), rel_tol).value
    return abs(quad_eval(pathway_spec(spec, beta), rel_tol).value - target)


def kernel_gap(x, a, delta, beta):
    """|pathway kernel - exp(-a x**delta)| at a single point."""
    u = a * x ** delta
    if beta > 1.0:
        k = (1.0 + (beta - 1.0) * u) ** (-1.0 / (beta - 1.0))
    elif beta < 1.0:
        base = 1.0 - (1.0 - beta) * u
        k = base ** (1.0 / (1.0 - beta)) if base > 0 else 0.0
    else:
        raise DomainError("beta = 1 has no pathway kernel")
    return abs(k - math.exp(-u))


def gamma_ratio_limit_check(alpha_over_delta, s, beta_sequence, delta=1.0):
    """|ratio - 1| for Gamma(1+x) x**w / Gamma(w+1+x), x = 1/(1-beta), w = alpha/delta + s/delta.

    This is the factor that turns the I2beta Mellin form into the I1 one.
    """
    w = alpha_over_delta + complex(s) / delta
    out = []
    for beta in beta_sequence:
        if not beta < 1.0:
            raise DomainError("the gamma-ratio limit needs beta < 1")
        out.append(abs(asymptotic_gamma_ratio(1.0 / (1.0 - beta), 1.0, 1.0 + w) - 1.0))
    return out


def default_betas(side, ks=range(4, 17)):
    sgn = 1.0 if side > 0 else -1.0
    return [1.0 + sgn * 2.0 ** -k for k in ks]


def empirical_order(distances, errors):
    """Log-log slope of errors against |1 - beta|."""
    return float(np.polyfit(np.log(distances), np.log(errors), 1)[0])


@dataclass(frozen=True)
class LimitStudy:
    base_spec: IntegralSpec
    beta_sequence: tuple
    errors: tuple

    @property
    def order(self):
        return empirical_order([abs(1.0 - b) for b in self.beta_sequence], self.errors)

    @property
    def monotone(self):
        return all(e2 < e1 for e1, e2 in zip(self.errors, self.errors[1:]))


def limit_study(spec, side, ks=range(4, 17), rel_tol=1e-12):
    """Gaps along beta = 1 + side * 2**-k (side = +1 for I1beta, -1 for I2beta)."""
    betas = default_betas(side, ks)
    diffs = np.diff(betas)
    if not (np.all(diffs < 0) or np.all(diffs > 0)):
        raise ValueError("beta sequence must be strictly monotone")
    target = quad_eval(classical_target(spec), rel_tol).value
    errors = tuple(abs(quad_eval(pathway_spec(spec, b), rel_tol).value - target) for b in betas)
    return LimitStudy(spec, tuple(betas), errors)
