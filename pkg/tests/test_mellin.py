import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ratekit.errors import (CoincidentPoleError, ContourError, DivergenceError, DomainError,
                            TruncationError, UnsupportedShape, UnsupportedVariant)
from ratekit.integrals import IntegralSpec, Method, Variant, quad_eval
from ratekit.mellin import (ContourConfig, MeijerGParams, MellinIntegrand, auto_contour,
                            contour_eval, default_abscissa, integral_to_mellin,
                            residue_series_eval)
from ratekit.representations import reduce

SQRT_PI = math.sqrt(math.pi)


def exp_pair(z):
    return MellinIntegrand(num_gammas=[(0.0, 1.0)], base=z)


def G(m, n, upper, lower, z):
    return MeijerGParams(m, n, len(upper), len(lower), tuple(upper), tuple(lower), z)


# --- types ----------------------------------------------------------------------

def test_integrand_validation():
    with pytest.raises(ValueError):
        MellinIntegrand(num_gammas=[(0.0, 0.0)])
    with pytest.raises(ValueError):
        MellinIntegrand(num_gammas=[(0.0, 1.0)], base=0.0)
    phi = MellinIntegrand(num_gammas=[(0.5, 2.0)], den_gammas=[(1.0, 0.5)],
                          reflected_gammas=[(3.0, 1.0)])
    assert phi.decay_mass == 2.5
    assert phi.left_pole_edge == -0.25
    assert phi.right_pole_edge == 3.0


def test_meijer_params_validation():
    with pytest.raises(ValueError):
        MeijerGParams(3, 0, 0, 2, (), (0.0, 1.0), 1.0)
    with pytest.raises(ValueError):
        MeijerGParams(1, 0, 0, 2, (), (0.0,), 1.0)
    with pytest.raises(ValueError):
        G(1, 0, [], [0.0], -1.0)
    # a pole of Gamma(b + s) on a pole of Gamma(1 - a - s)
    with pytest.raises(ContourError):
        G(2, 1, [1.0], [0.0, 1.0], 1.0)
    with pytest.raises(ContourError):
        G(1, 1, [3.0], [0.0], 1.0)
    G(1, 1, [0.5], [0.0], 1.0)
    assert G(2, 0, [2.0], [0.0, 0.5], 1.0).sign == -1
    assert G(2, 1, [0.2], [0.0, 0.5], 1.0).sign == 1


def test_contour_config():
    with pytest.raises(ValueError):
        ContourConfig(0.75, 0.0, 11)
    with pytest.raises(ValueError):
        ContourConfig(0.75, 10.0, 2)
    cfg = ContourConfig(0.75, 10.0, 100)
    assert cfg.nodes == 101 and cfg.step == pytest.approx(0.2)


def test_default_abscissa():
    assert default_abscissa(exp_pair(1.0)) == 0.75
    phi = MellinIntegrand(num_gammas=[(-2.0, 1.0)], base=1.0)
    assert default_abscissa(phi) == pytest.approx(2.75)
    # right poles crowding in: mid-gap
    phi = MellinIntegrand(num_gammas=[(0.0, 1.0)], reflected_gammas=[(0.8, 1.0)], base=1.0)
    assert default_abscissa(phi) == pytest.approx(0.4)


# --- contour ----------------------------------------------------------------------

def test_contour_examples(oracles):
    r = contour_eval(exp_pair(1.0), ContourConfig(1.0, 40.0, 1601))
    assert r.value == pytest.approx(math.exp(-1), rel=1e-12)
    assert r.value == pytest.approx(0.3678794412, abs=1e-10)
    assert r.method is Method.MELLIN_BARNES

    phi = MellinIntegrand(num_gammas=[(0.0, 1.0), (0.5, 1.0)], base=1.0)
    r = contour_eval(phi)
    assert r.value == pytest.approx(SQRT_PI * math.exp(-2), rel=1e-12)

    s = IntegralSpec(Variant.I1, 1.0, 1.0, 1.0, 1.0, 1.0)
    phi = integral_to_mellin(s)
    r = contour_eval(phi)
    assert r.value == pytest.approx(quad_eval(s, 1e-12).value, rel=1e-9)
    assert r.value == pytest.approx(oracles["bessel"][0]["value"], rel=1e-12)


@pytest.mark.parametrize("z", [0.1, 1.0, 5.0])
def test_mellin_pair(z):
    r = contour_eval(exp_pair(z))
    assert abs(r.value - math.exp(-z)) <= 1e-11 * math.exp(-z)


def test_contour_errors():
    phi = exp_pair(1.0)
    with pytest.raises(ContourError):
        contour_eval(phi, ContourConfig(-0.5, 40.0, 1601))
    with pytest.raises(TruncationError):
        contour_eval(phi, ContourConfig(0.75, 3.0, 121))
    with pytest.raises(ContourError):
        auto_contour(MellinIntegrand(num_gammas=[(0.0, 1.0)], reflected_gammas=[(1.0, 1.0)]),
                     c=1.5)
    flat = MellinIntegrand(num_gammas=[(0.0, 1.0)], den_gammas=[(0.5, 1.0)])
    with pytest.raises(TruncationError):
        auto_contour(flat)


def _vals(oracles):
    for row in oracles["meijer_g"]:
        g = MeijerGParams(row["m"], row["n"], row["p"], row["q"], tuple(row["upper"]),
                          tuple(row["lower"]), row["z"])
        yield g, row["value"]


def test_contour_matches_mpmath_meijer_g(oracles):
    for g, want in _vals(oracles):
        r = contour_eval(g.to_integrand())
        assert r.value == pytest.approx(want, rel=1e-10), g
        assert abs(r.value - want) <= 10 * r.abs_error_estimate + 1e-15 * abs(want)


def test_series_matches_mpmath_meijer_g(oracles):
    for g, want in _vals(oracles):
        r = residue_series_eval(g)
        assert r.value == pytest.approx(want, rel=1e-12), g
        assert r.method is Method.RESIDUE_SERIES


def test_contour_imag_part_is_reported():
    r = contour_eval(exp_pair(2.0))
    assert abs(r.imag_part) <= 1e-10 * abs(r.value)
    assert r.abs_error_estimate >= abs(r.imag_part)


# --- residue series -----------------------------------------------------------------

def test_series_examples():
    r = residue_series_eval(G(1, 0, [], [0.0], 2.0))
    assert r.value == pytest.approx(math.exp(-2), rel=1e-15)
    assert r.value == pytest.approx(0.1353352832, abs=1e-10)
    r = residue_series_eval(G(2, 0, [], [0.0, 0.5], 1.0))
    assert r.value == pytest.approx(SQRT_PI * math.exp(-2), rel=1e-14)
    cont = contour_eval(G(2, 0, [], [0.0, 0.5], 1.0).to_integrand())
    assert r.value == pytest.approx(cont.value, rel=1e-12)


def test_degenerate_i1beta_instance_is_rejected():
    # alpha = rho = delta = 1, beta = 2: alpha (beta - 1) = delta, so the integral diverges,
    # and the G-form has upper 1 against lower 0 (no separating contour)
    s = IntegralSpec(Variant.I1BETA, 1.0, 1.0, 1.0, 1.0, 1.0, beta=2.0)
    with pytest.raises(DomainError):
        reduce(s)
    with pytest.raises(ContourError):
        G(2, 1, [1.0], [0.0, 1.0], 1.0)


def test_series_matches_i1beta_quadrature():
    # the convergent neighbour of the degenerate instance: alpha = 0.5, beta = 1.5
    s = IntegralSpec(Variant.I1BETA, 0.5, 1.0, 2.0, 1.0, 1.0, beta=1.5)
    form = reduce(s)
    assert (form.g.m, form.g.n, form.g.p, form.g.q) == (2, 1, 1, 2)
    r = residue_series_eval(form.g, log_scale=form.log_prefactor)
    assert r.value == pytest.approx(quad_eval(s, 1e-12).value, rel=1e-10)


def test_series_errors():
    with pytest.raises(CoincidentPoleError):
        residue_series_eval(G(2, 0, [], [0.0, 1.0], 1.0))
    with pytest.raises(CoincidentPoleError):
        residue_series_eval(G(2, 0, [], [0.25, 3.25], 1.0))
    with pytest.raises(DivergenceError):
        residue_series_eval(G(2, 0, [], [0.0, 0.5], 50.0), max_terms=5)
    with pytest.raises(UnsupportedShape):
        residue_series_eval(G(1, 2, [0.1, 0.2], [0.0, 0.5, 0.7], 1.0))
    with pytest.raises(UnsupportedShape):
        residue_series_eval(G(1, 1, [0.3], [0.0], 1.0))
    with pytest.raises(UnsupportedShape):
        residue_series_eval(G(0, 0, [], [0.0, 0.5], 1.0))


def test_series_terminating_family():
    # 1/Gamma(a - b1 - k) = 1/Gamma(1 - k) hits a pole after one term
    g = G(2, 0, [1.0], [0.0, 0.5], 0.7)
    r = residue_series_eval(g)
    assert r.value == pytest.approx(contour_eval(g.to_integrand()).value, rel=1e-12)


def test_series_complex_parameters():
    g = G(2, 0, [], [0.1 + 0.2j, 0.6 - 0.2j], 1.5)
    s = residue_series_eval(g)
    c = contour_eval(g.to_integrand(), ContourConfig(1.0, 60.0, 6001))
    assert s.value == pytest.approx(c.value, rel=1e-9)


# --- integral_to_mellin ---------------------------------------------------------------

def test_integral_to_mellin_examples():
    phi = integral_to_mellin(IntegralSpec(Variant.I1, 1.0, 1.0, 1.0, 1.0, 1.0))
    assert phi.num_gammas == ((0j, 1.0), (1 + 0j, 1.0))
    assert phi.den_gammas == () and phi.reflected_gammas == ()
    assert phi.base == 1.0 and phi.prefactor == 1.0

    s = IntegralSpec(Variant.I1BETA, 1.0, 1.0, 1.0, 2.0, 0.5, beta=1.5)
    phi = integral_to_mellin(s)
    e = 0.5
    assert phi.reflected_gammas == ((complex(1 / 0.5 - e), 0.5),)
    # the H-form upper parameter (e + (beta-2)/(beta-1), 1/delta) yields Gamma(1 - a - s/delta)
    upper = e + (1.5 - 2) / (1.5 - 1)
    assert phi.reflected_gammas[0][0].real == pytest.approx(1 - upper)
    assert phi.prefactor == pytest.approx(1 / (math.gamma(2.0) * 2.0 * 0.5 * 0.5 ** e))

    s = IntegralSpec(Variant.I2BETA, 1.0, 1.0, 1.0, 1.0, 1.0, beta=0.5)
    phi = integral_to_mellin(s)
    assert phi.den_gammas == ((complex(1 + 1 + 2), 1.0),)
    assert phi.prefactor == pytest.approx(math.gamma(3.0) / 0.5)
    assert phi.base == pytest.approx(0.5)


def test_integral_to_mellin_rejects_i2():
    with pytest.raises(UnsupportedVariant):
        integral_to_mellin(IntegralSpec(Variant.I2, 1.0, 1.0, 1.0, 1.0, 1.0, cutoff=3.0))
    with pytest.raises(UnsupportedVariant):
        integral_to_mellin(IntegralSpec(Variant.I1, 1.0, 1.0, 0.0, 1.0, 1.0))


@pytest.mark.parametrize("variant,beta", [("i1", None), ("i1beta", 1.3), ("i2beta", 0.4),
                                          ("i2beta", -1.5)])
def test_h_form_contour_matches_quadrature(variant, beta):
    s = IntegralSpec(Variant(variant), 1.3, 0.8, 1.7, 1.4, 0.6, beta=beta)
    r = contour_eval(integral_to_mellin(s))
    assert r.value == pytest.approx(quad_eval(s, 1e-12).value, rel=1e-9)


# --- invariants -------------------------------------------------------------------------

shapes = st.sampled_from(["g0", "g1", "gb"])


def _draw_meijer(shape, m, lower, up, z):
    lower = tuple(lower[: m + 1])
    if shape == "g0":
        return G(m + 1, 0, [], lower, z)
    if shape == "g1":
        return G(m + 1, 1, [-up], lower, z)
    return G(m + 1, 0, [max(lower) + 1.5 + up], lower, z)


meijer = st.builds(_draw_meijer, shapes, st.integers(1, 3),
                   st.lists(st.floats(0.0, 2.0), min_size=4, max_size=4).filter(
                       lambda bs: all(abs((x - y) - round(x - y)) > 0.02
                                      for i, x in enumerate(bs) for y in bs[i + 1:])),
                   st.floats(0.1, 2.0), st.floats(0.01, 20.0))


@settings(max_examples=100)
@given(meijer)
def test_series_contour_agreement(g):
    s = residue_series_eval(g)
    c = contour_eval(g.to_integrand())
    assert s.value == pytest.approx(c.value, rel=1e-9)
    assert s.abs_error_estimate <= 1e-10 * abs(s.value)
    assert abs(c.imag_part) <= 1e-10 * abs(c.value)


@settings(max_examples=50)
@given(meijer, st.floats(0.2, 0.8))
def test_contour_independence(g, frac):
    phi = g.to_integrand()
    lo = max(phi.left_pole_edge, -0.5)
    hi = min(phi.right_pole_edge, lo + 3.0)
    r1 = contour_eval(phi, auto_contour(phi, lo + 0.5 * frac * (hi - lo)))
    r2 = contour_eval(phi, auto_contour(phi, lo + (0.5 + 0.5 * frac) * (hi - lo)))
    assert abs(r1.value - r2.value) <= 10 * (r1.abs_error_estimate + r2.abs_error_estimate)


@settings(max_examples=30)
@given(meijer)
def test_truncation_doubling(g):
    phi = g.to_integrand()
    cfg = auto_contour(phi)
    r1 = contour_eval(phi, cfg)
    r2 = contour_eval(phi, ContourConfig(cfg.c, 2 * cfg.half_height, 2 * cfg.nodes - 1))
    assert abs(r1.value - r2.value) <= r1.abs_error_estimate


def test_contour_is_bit_reproducible():
    phi = G(3, 1, [-0.8], [0.0, 0.5, 0.2], 12.0).to_integrand()
    assert contour_eval(phi) == contour_eval(phi)
    assert np.isfinite(contour_eval(phi).value)


@pytest.mark.parametrize("b", [1e2, 1e4, 8e4, 1.2e5])
def test_contour_far_tail(b):
    # the saddle of the line integrand moves out to c ~ sqrt(b)
    from scipy.special import kve
    s = IntegralSpec(Variant.I1, 1.0, 1.0, b, 1.0, 1.0)
    r = contour_eval(integral_to_mellin(s))
    root = 2 * math.sqrt(b)
    want = root * kve(1, root) * math.exp(-root)
    assert r.value == pytest.approx(want, rel=1e-11)
    assert abs(r.value - want) <= r.abs_error_estimate
