"""Randomised verification suites behind ``ratekit verify``.

Every suite draws all of its random parameters up front from one seeded
generator, then evaluates the cases (possibly in a process pool) and
returns them in generation order, so a report depends only on the seed.
"""
import cmath
import math
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy import special

from .errors import MethodDisagreement, RatekitError
from .gamma import gauss_multiplication_residual, log_gamma, wrap_imag
from .integrals import IntegralSpec, Variant, quad_eval
from .limits import gamma_ratio_limit_check, limit_study
from .mellin import (MeijerGParams, MellinIntegrand, auto_contour, contour_eval,
                     integral_to_mellin, residue_series_eval)
from .ode import (OdeProbe, fd_refinement, fd_residual, mellin_operator_identity,
                  operator_from_theorem)
from .representations import evaluate, g_value, reduce

SUITES = ("repr", "ode", "limit", "identities")
VARIANTS = (Variant.I1, Variant.I1BETA, Variant.I2BETA)
ODE_Z_POINTS = (0.25, 0.5, 1.0, 2.0, 4.0)
FD_STEP = 1e-2
REFINEMENT_STEPS = (0.4, 0.2, 0.1, 0.05)

REPR_TOL = 1e-6
BESSEL_TOL = 1e-9
IDENTITY_TOL = 1e-11
NEGATIVE_CONTROL_MIN = 1e-4
FD_TOL = 1e-3
COHERENCE_TOL = 1e-9


def _case(suite, name, params, residual, tolerance, passed=None, **extra):
    if passed is None:
        passed = residual <= tolerance
    out = {"suite": suite, "name": name, "params": params,
           "residual": float(residual), "tolerance": float(tolerance), "passed": bool(passed)}
    out.update(extra)
    return out


def _failed(suite, name, params, exc):
    return {"suite": suite, "name": name, "params": params, "residual": None,
            "tolerance": None, "passed": False, "error": f"{type(exc).__name__}: {exc}"}


def _spec_params(spec):
    return {k: (v.value if isinstance(v, Variant) else v)
            for k, v in vars(spec).items() if v is not None}


def draw_spec(rng, variant, m, corollary=False):
    """A random valid spec with delta = m*rho (delta = 1, rho = 1/m for corollaries)."""
    alpha = float(rng.uniform(0.3, 3.0))
    a = float(rng.uniform(0.2, 5.0))
    b = float(rng.uniform(0.2, 5.0))
    if corollary:
        rho, delta = 1.0 / m, 1.0
    else:
        rho = float(rng.uniform(0.25, 1.5))
        delta = m * rho
    beta = None
    if variant is Variant.I1BETA:
        # convergence needs alpha*(beta-1) < delta
        beta = 1.0 + float(rng.uniform(0.05, 0.9)) * delta / alpha
    elif variant is Variant.I2BETA:
        beta = float(rng.uniform(-1.0, 0.95))
    return IntegralSpec(variant, alpha, a, b, delta, rho, beta=beta)


# --- case workers (module level so a process pool can pickle them) ----------

def repr_case(spec):
    params = _spec_params(spec)
    name = f"{spec.variant.value} m={round(spec.delta / spec.rho)}"
    try:
        q = quad_eval(spec, 1e-12)
        form = reduce(spec)
        gv = g_value(form)
        rel = abs(q.value - gv.value) / abs(q.value)
        try:
            evaluate(spec)
            disagreement = False
        except MethodDisagreement:
            disagreement = True
    except RatekitError as exc:
        return _failed("repr", name, params, exc)
    return _case("repr", name, params, rel, REPR_TOL, passed=rel <= REPR_TOL and not disagreement,
                 quadrature=q.value, g_route=gv.method.value, method_disagreement=disagreement)


def bessel_case(a, b):
    spec = IntegralSpec(Variant.I1, 1.0, a, b, 1.0, 1.0)
    params = {"a": a, "b": b}
    exact = 2.0 * math.sqrt(b / a) * float(special.k1(2.0 * math.sqrt(a * b)))
    try:
        values = [evaluate(spec, m).value for m in ("quadrature", "contour", "series")]
    except RatekitError as exc:
        return _failed("repr", "bessel anchor", params, exc)
    rel = max(abs(v - exact) / exact for v in values)
    return _case("repr", "bessel anchor", params, rel, BESSEL_TOL, reference=exact)


def ode_exact_case(spec, s_samples, corollary):
    family = f"{'corollary' if corollary else 'theorem'} {spec.variant.value}"
    params = _spec_params(spec)
    try:
        op = operator_from_theorem(spec)
        g = reduce(spec).g
        res = mellin_operator_identity(op, g, s_samples)
        control = mellin_operator_identity(op.perturbed(1e-3), g, s_samples)
    except RatekitError as exc:
        return _failed("ode", family, params, exc)
    passed = res < IDENTITY_TOL and control > NEGATIVE_CONTROL_MIN
    return _case("ode", f"mellin identity {family}", params, res, IDENTITY_TOL, passed=passed,
                 negative_control=control)


def ode_fd_case(spec, corollary):
    family = f"{'corollary' if corollary else 'theorem'} {spec.variant.value}"
    params = _spec_params(spec)
    try:
        op = operator_from_theorem(spec)
        points = 5 if op.m_order == 2 else 7
        res = fd_residual(op, spec, OdeProbe(ODE_Z_POINTS, FD_STEP, points))
        study = fd_refinement(op, spec, 1.0, REFINEMENT_STEPS, points)
    except RatekitError as exc:
        return _failed("ode", family, params, exc)
    worst = max(res)
    return _case("ode", f"finite differences {family}", params, worst, FD_TOL,
                 passed=worst < FD_TOL and study.slope_ok, residuals=res,
                 slope=study.slope, expected_slope=study.expected_order)


def limit_case(spec, side, ks):
    params = dict(_spec_params(spec), side=side)
    try:
        study = limit_study(spec, side, ks)
    except RatekitError as exc:
        return _failed("limit", "pathway gap", params, exc)
    order = study.order
    name = "pathway gap i1beta" if side > 0 else "pathway gap i2beta"
    return _case("limit", name, params, abs(order - 1.0), 0.5,
                 order=order, monotone=study.monotone, gaps=list(study.errors))


def ratio_case(alpha_over_delta, s, ks):
    params = {"alpha_over_delta": alpha_over_delta, "s_re": s.real, "s_im": s.imag}
    betas = [1.0 - 2.0 ** -k for k in ks]
    devs = gamma_ratio_limit_check(alpha_over_delta, s, betas)
    # worst |ratio - 1| / (5 (1 - beta)); below 1 means within the bound
    worst = max(d / (5.0 * (1.0 - b)) for d, b in zip(devs, betas))
    order = float(np.polyfit(np.log([1.0 - b for b in betas]), np.log(devs), 1)[0])
    return _case("limit", "gamma ratio", params, worst, 1.0, order=order)


def gamma_case(kind, zs, m=None):
    if kind == "multiplication":
        res = max(gauss_multiplication_residual(z, m) for z in zs)
        return _case("identities", f"multiplication m={m}", {"m": m, "samples": len(zs)},
                     res, IDENTITY_TOL)
    if kind == "functional":
        res = max(abs(cmath.exp(log_gamma(z + 1) - log_gamma(z)) - z) / abs(z) for z in zs)
        return _case("identities", "functional equation", {"samples": len(zs)}, res, 1e-12)
    res = 0.0
    for z in zs:
        rhs = math.log(math.pi) - cmath.log(cmath.sin(math.pi * z))
        res = max(res, abs(wrap_imag(log_gamma(z) + log_gamma(1 - z) - rhs)))
    return _case("identities", "reflection", {"samples": len(zs)}, res, IDENTITY_TOL)


def mellin_pair_case(z):
    phi = MellinIntegrand(num_gammas=[(0.0, 1.0)], base=z)
    res = abs(contour_eval(phi).value - math.exp(-z))
    return _case("identities", "mellin pair exp(-z)", {"z": z}, res, 1e-11)


def coherence_case(g):
    params = {"m": g.m, "n": g.n, "p": g.p, "q": g.q, "upper": list(g.upper),
              "lower": list(g.lower), "z": g.z}
    try:
        phi = g.to_integrand()
        lo = max(phi.left_pole_edge, -3.0)
        hi = min(phi.right_pole_edge, lo + 3.0)
        c1, c2 = lo + 0.3 * (hi - lo), lo + 0.7 * (hi - lo)
        r1 = contour_eval(phi, auto_contour(phi, c1))
        r2 = contour_eval(phi, auto_contour(phi, c2))
        contour = contour_eval(phi)
        series = residue_series_eval(g)
    except RatekitError as exc:
        return _failed("identities", "method coherence", params, exc)
    independence = abs(r1.value - r2.value) / (r1.abs_error_estimate + r2.abs_error_estimate)
    agreement = abs(series.value - contour.value) / abs(contour.value)
    passed = independence <= 1.0 and agreement <= COHERENCE_TOL
    return _case("identities", "method coherence", params, agreement, COHERENCE_TOL,
                 passed=passed, abscissa_ratio=independence)


def draw_meijer(rng):
    """Random G instance shaped like the integral reductions, with simple poles and z in [0.01, 20]."""
    m = int(rng.integers(1, 4))
    shape = int(rng.integers(0, 3))
    while True:
        lower = [float(x) for x in rng.uniform(0.0, 2.0, m + 1)]
        gaps = [abs(x - y) for i, x in enumerate(lower) for y in lower[i + 1:]]
        if all(abs(d - round(d)) > 0.05 for d in gaps):
            break
    z = float(math.exp(rng.uniform(math.log(0.01), math.log(20.0))))
    if shape == 0:
        return MeijerGParams(m + 1, 0, 0, m + 1, (), lower, z)
    if shape == 1:
        # the strip between -min(b) and 1 - a must be non-empty
        upper = (1.0 - float(rng.uniform(0.2, 3.0)),)
        return MeijerGParams(m + 1, 1, 1, m + 1, upper, lower, z)
    upper = (max(lower) + float(rng.uniform(1.0, 4.0)),)
    return MeijerGParams(m + 1, 0, 1, m + 1, upper, lower, z)


# --- suite builders -----------------------------------------------------------

def _spec_variant_m(spec):
    return spec.variant, round(spec.delta / spec.rho)


def repr_jobs(rng, spec=None, draws=25):
    jobs = []
    combos = [_spec_variant_m(spec)] if spec else [(v, m) for v in VARIANTS for m in (1, 2, 3)]
    for variant, m in combos:
        for _ in range(draws):
            jobs.append((repr_case, (draw_spec(rng, variant, m),)))
    if spec is not None and spec.variant is not Variant.I2:
        jobs.insert(0, (repr_case, (spec,)))
    if spec is None:
        for _ in range(10):
            a, b = (float(x) for x in rng.uniform(0.1, 10.0, 2))
            jobs.append((bessel_case, (a, b)))
    return jobs


def _s_samples(rng, n=100):
    re = rng.uniform(-3.0, 3.0, n)
    im = rng.uniform(0.5, 5.0, n) * rng.choice([-1.0, 1.0], n)
    return [complex(x, y) for x, y in zip(re, im)]


def ode_jobs(rng, spec=None, draws=100):
    jobs = []
    if spec is not None:
        corollary = spec.delta == 1.0
        for _ in range(draws):
            jobs.append((ode_exact_case, (spec, _s_samples(rng), corollary)))
        jobs.append((ode_fd_case, (spec, corollary)))
        return jobs
    for corollary in (False, True):
        for variant in VARIANTS:
            for _ in range(draws):
                m = int(rng.integers(1, 4))
                jobs.append((ode_exact_case,
                             (draw_spec(rng, variant, m, corollary), _s_samples(rng), corollary)))
    for corollary in (False, True):
        for variant in VARIANTS:
            for m in (1, 2):
                jobs.append((ode_fd_case, (draw_spec(rng, variant, m, corollary), corollary)))
    return jobs


def limit_jobs(rng, spec=None, ks=range(4, 13)):
    if spec is not None:
        bases = [spec.with_(variant=Variant.I1, beta=None, cutoff=None)]
    else:
        bases = [IntegralSpec(Variant.I1, 1.0, 1.0, 1.0, 1.0, 1.0)]
        for _ in range(3):
            bases.append(draw_spec(rng, Variant.I1, int(rng.integers(1, 3))))
    jobs = [(limit_case, (base, side, tuple(ks))) for base in bases for side in (1, -1)]
    for _ in range(10):
        aod = float(rng.uniform(0.1, 1.0))
        s = complex(rng.uniform(0.05, 1.0), rng.uniform(-0.5, 0.5))
        jobs.append((ratio_case, (aod, s, tuple(range(6, 17)))))
    return jobs


def _random_z(rng, n):
    return [complex(x, y) for x, y in zip(rng.uniform(-50, 50, n), rng.uniform(-50, 50, n))]


def identity_jobs(rng, spec=None):
    jobs = []
    for m in range(2, 7):
        zs = [complex(x, y) for x, y in zip(rng.uniform(0.05, 5.0, 200), rng.uniform(-5, 5, 200))]
        jobs.append((gamma_case, ("multiplication", zs, m)))
    zs = _random_z(rng, 1000)
    jobs.append((gamma_case, ("functional", zs)))
    jobs.append((gamma_case, ("reflection", _random_z(rng, 1000))))
    for z in (0.1, 1.0, 5.0):
        jobs.append((mellin_pair_case, (z,)))
    for _ in range(100):
        jobs.append((coherence_case, (draw_meijer(rng),)))
    return jobs


BUILDERS = {"repr": repr_jobs, "ode": ode_jobs, "limit": limit_jobs, "identities": identity_jobs}


def _run(job):
    fn, args = job
    return fn(*args)


def default_workers():
    env = os.environ.get("RATEKIT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_suites(suites, seed, spec=None, workers=None):
    """Run the named suites and return their cases in a seed-determined order."""
    rng = np.random.default_rng(seed)
    jobs = []
    for name in suites:
        jobs.extend(BUILDERS[name](rng, spec))
    workers = workers or default_workers()
    if workers <= 1 or len(jobs) < 2:
        return [_run(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run, jobs, chunksize=max(1, len(jobs) // (8 * workers))))


def summarize(cases):
    failed = sum(not c["passed"] for c in cases)
    return {"total": len(cases), "passed": len(cases) - failed, "failed": failed}
