import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ratekit.errors import DomainError, UnsupportedVariant
from ratekit.integrals import IntegralSpec, Variant, quad_eval
from ratekit.limits import (LimitStudy, classical_target, default_betas, empirical_order,
                            gamma_ratio_limit_check, kernel_gap, limit_study, pathway_gap,
                            pathway_spec)

I1 = IntegralSpec(Variant.I1, 1.0, 1.0, 1.0, 1.0, 1.0)


def _oracle_gap(oracles, beta):
    return next(r["gap"] for r in oracles["pathway"] if r["beta"] == beta)


def test_gap_examples(oracles):
    g = pathway_gap(I1, 1 + 1e-6)
    assert g < 1e-5
    assert g == pytest.approx(_oracle_gap(oracles, 1 + 1e-6), rel=1e-4)
    g1 = pathway_gap(I1, 0.999)
    assert g1 < 1e-2
    assert g1 == pytest.approx(_oracle_gap(oracles, 0.999), rel=1e-7)
    g2 = pathway_gap(I1, 0.9995)
    assert g2 == pytest.approx(_oracle_gap(oracles, 0.9995), rel=1e-7)
    assert 1.5 <= g1 / g2 <= 3.0


def test_beta_one_is_rejected():
    with pytest.raises(DomainError):
        pathway_gap(I1, 1.0)
    with pytest.raises(DomainError):
        kernel_gap(1.0, 1.0, 1.0, 1.0)


def test_base_must_be_classical():
    with pytest.raises(UnsupportedVariant):
        pathway_spec(IntegralSpec(Variant.I1BETA, 1.0, 1.0, 1.0, 1.0, 1.0, beta=1.5), 1.1)
    i2 = IntegralSpec(Variant.I2, 1.0, 1.0, 1.0, 1.0, 1.0, cutoff=3.0)
    # the target is always the infinite-range I1
    assert classical_target(i2) == I1
    assert pathway_gap(i2, 0.999) == pytest.approx(pathway_gap(I1, 0.999), rel=1e-14)


def test_pathway_spec_sides():
    assert pathway_spec(I1, 1.2).variant is Variant.I1BETA
    s = pathway_spec(I1, 0.8)
    assert s.variant is Variant.I2BETA and s.cutoff == pytest.approx(5.0)


def test_gamma_ratio_examples(oracles):
    d1, d2 = gamma_ratio_limit_check(1.0, 1.0, [0.99, 0.999])
    assert d1 < 0.1
    assert 8 <= d1 / d2 <= 12
    want = {r["beta"]: r["deviation"] for r in oracles["gamma_ratio"]}
    assert d1 == pytest.approx(want[0.99], rel=1e-10)
    assert d2 == pytest.approx(want[0.999], rel=1e-10)


def test_gamma_ratio_degenerate_exponent():
    # alpha/delta + s/delta = 0: Gamma(1+x)/Gamma(1+x) for every beta
    assert gamma_ratio_limit_check(0.5, -0.5, [0.0, 0.9, 0.999999]) == [0.0, 0.0, 0.0]
    with pytest.raises(DomainError):
        gamma_ratio_limit_check(1.0, 1.0, [1.2])


@given(st.floats(0.1, 1.0), st.floats(0.05, 1.0), st.floats(-0.5, 0.5))
def test_gamma_ratio_first_order(aod, re, im):
    devs = gamma_ratio_limit_check(aod, complex(re, im), default_betas(-1, range(6, 17)))
    order = empirical_order([2.0 ** -k for k in range(6, 17)], devs)
    assert abs(order - 1.0) < 0.1
    assert all(d2 < d1 for d1, d2 in zip(devs, devs[1:]))


def test_kernel_convergence_is_linear():
    xs = np.linspace(0.05, 3.0, 40)
    for side in (+1, -1):
        cs = []
        for k in (8, 12, 16):
            eps = 2.0 ** -k
            gaps = [kernel_gap(x, 1.3, 1.4, 1 + side * eps) for x in xs]
            cs.append(max(gaps) / eps)
        # the measured constant C = max_x gap / |1 - beta| settles
        assert cs[-1] == pytest.approx(cs[-2], rel=1e-2)
        assert 0.1 < cs[-1] < 1.0


def test_limit_study_orders():
    for side in (+1, -1):
        study = limit_study(I1, side)
        assert isinstance(study, LimitStudy)
        assert study.monotone
        assert abs(study.order - 1.0) < 0.1


def test_limit_study_general_parameters():
    s = IntegralSpec(Variant.I1, 1.7, 0.6, 2.2, 1.3, 0.8)
    up = limit_study(s, +1, ks=range(6, 14))
    down = limit_study(s, -1, ks=range(6, 14))
    assert up.monotone and down.monotone
    assert abs(up.order - 1) < 0.1 and abs(down.order - 1) < 0.1
    # superstatistics kernel lies above exp(-u): I1beta > I1
    target = quad_eval(s, 1e-12).value
    assert quad_eval(pathway_spec(s, up.beta_sequence[0])).value > target


def test_default_betas():
    assert default_betas(+1, range(4, 6)) == [1 + 1 / 16, 1 + 1 / 32]
    assert default_betas(-1, range(4, 6)) == [1 - 1 / 16, 1 - 1 / 32]
    assert len(default_betas(+1)) == 13
    assert math.isclose(empirical_order([1, 0.5, 0.25], [3, 1.5, 0.75]), 1.0)
