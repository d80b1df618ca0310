import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import wsnfusion as w
from wsnfusion.analytics import roc_curve, that_moments
from wsnfusion.fusion import (
    FusionRule,
    equal_linear_weights,
    equal_weights,
    fuse,
    fuse_array,
    linear_weights,
    make_rule,
    optimal_weights,
    parse_rule_name,
    quantized_weights,
    weighted_weights,
)
from wsnfusion.scenario import Scenario, SensorSite


def unit_scenario(xi=1.0, var=1.0, n=10, m=1, bits=3):
    site = SensorSite(noise_var=var, signal_energy=xi * n * var, bits=bits)
    return Scenario(sites=(site,) * m, n_samples=n)


def test_optimal_hand_values():
    rule = optimal_weights(unit_scenario())
    assert rule.weights[0] == pytest.approx(1 / 30, rel=1e-14)
    assert rule.offsets[0] == 5.0
    assert optimal_weights(unit_scenario(xi=0.0)).weights[0] == 0.0


def test_optimal_high_snr_limit_is_weighted():
    sc = unit_scenario(xi=1e6)
    assert optimal_weights(sc).weights[0] == pytest.approx(weighted_weights(sc).weights[0], rel=1e-4)
    assert weighted_weights(unit_scenario()).weights[0] == pytest.approx(0.05)
    # a^w scales as sigma^-4: doubling the noise variance divides it by 4
    assert weighted_weights(unit_scenario(var=2.0)).weights[0] == pytest.approx(0.05 / 4)
    assert weighted_weights(unit_scenario(var=4.0)).weights[0] == pytest.approx(0.05 / 16)


def test_equal_and_linear_values(scenario):
    np.testing.assert_array_equal(equal_weights(scenario).weights, 1.0)
    np.testing.assert_array_equal(equal_weights(scenario).offsets, optimal_weights(scenario).offsets)
    assert linear_weights(unit_scenario()).weights[0] == pytest.approx(1 / 30)
    np.testing.assert_allclose(
        linear_weights(scenario).weights / optimal_weights(scenario).weights, scenario.noise_var, rtol=1e-12
    )
    np.testing.assert_array_equal(equal_linear_weights(scenario).weights, 1.0)


def test_quantized_optimal_hand_values():
    rule = quantized_weights("optimal", unit_scenario(), quant_var=[2.0])
    assert rule.weights[0] == pytest.approx(1 / (10 * 3.1 * 1.1), rel=1e-14)
    assert rule.offsets[0] == pytest.approx(4.5, rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(
    xi=st.floats(1e-3, 10.0),
    var=st.floats(0.05, 5.0),
    n=st.integers(1, 500),
    qv=st.floats(0.0, 10.0),
)
def test_quantized_optimal_is_gaussian_llr_quadratic(xi, var, n, qv):
    # Gaussian model of T_hat: its log-likelihood ratio is c (t - b)^2 + const
    site = SensorSite(noise_var=var, signal_energy=xi * n * var)
    mom = that_moments(site, n, qv)
    coeff = 0.5 * (1 / mom.var_h0 - 1 / mom.var_h1)
    center = (mom.mean_h0 * mom.var_h1 - mom.mean_h1 * mom.var_h0) / (mom.var_h1 - mom.var_h0)
    rule = quantized_weights("optimal", Scenario(sites=(site,), n_samples=n), quant_var=[qv])
    assert rule.weights[0] == pytest.approx(2 * coeff, rel=1e-9)
    assert rule.offsets[0] == pytest.approx(center, rel=1e-9, abs=1e-9 * n * var)


@settings(max_examples=100, deadline=None)
@given(xi=st.floats(1e-3, 10.0), var=st.floats(0.05, 5.0), n=st.integers(1, 500), qv=st.floats(0.0, 10.0))
def test_quantized_weighted_and_linear_are_the_printed_forms_rescaled(xi, var, n, qv):
    sc = unit_scenario(xi=xi, var=var, n=n)
    s = qv / (2 * n * var**2)
    printed_wq = 1 / (n * var**2 * (1 + s) ** 2)
    printed_lq = xi / (2 * var * (1 + 2 * xi + qv / (n * var)))
    # one common factor per family, so calibrated decisions are unchanged
    assert quantized_weights("weighted", sc, quant_var=[qv]).weights[0] == pytest.approx(printed_wq / 2, rel=1e-12)
    assert quantized_weights("linear", sc, quant_var=[qv]).weights[0] == pytest.approx(printed_lq * 2 / n, rel=1e-12)


@pytest.mark.parametrize("family", ["optimal", "weighted", "linear"])
def test_quantized_weights_decrease_with_noise(family):
    sc = unit_scenario()
    ws = [quantized_weights(family, sc, quant_var=[q]).weights[0] for q in (0.0, 0.1, 1.0, 10.0)]
    assert all(b < a for a, b in zip(ws, ws[1:]))
    offs = [quantized_weights("optimal", sc, quant_var=[q]).offsets[0] for q in (0.0, 0.1, 1.0)]
    assert all(b < a for a, b in zip(offs, offs[1:]))


def test_censored_sensors_get_zero_weight():
    sc = w.generate_scenario(4, 10, bits=[0, 2, 0, 1])
    for family in ("optimal", "weighted", "equal", "linear", "equal-linear"):
        rule = quantized_weights(family, sc)
        np.testing.assert_array_equal(rule.censored, [True, False, True, False])
        assert np.all(rule.weights[[0, 2]] == 0)


def test_rule_validation():
    with pytest.raises(ValueError):
        FusionRule("bogus", False, [1.0])
    with pytest.raises(ValueError):
        FusionRule("optimal", False, [1.0])  # missing offsets
    with pytest.raises(ValueError):
        FusionRule("linear", False, [1.0], offsets=[1.0])
    with pytest.raises(ValueError):
        FusionRule("linear", False, [1.0, 2.0], censored=[True, False])
    rule = FusionRule("linear", False, [1.0])
    with pytest.raises(ValueError):
        rule.weights[0] = 2.0


def test_parse_rule_name():
    assert parse_rule_name("optimal-q") == ("optimal", True)
    assert parse_rule_name("equal-linear") == ("equal-linear", False)
    assert parse_rule_name("equal-linear-q") == ("equal-linear", True)
    assert make_rule("optimal", unit_scenario(), quantized=True).name == "optimal-q"
    with pytest.raises(ValueError):
        parse_rule_name("median")


def test_fuse_hand_values():
    lin = FusionRule("linear", False, [1 / 30, 1 / 30])
    assert fuse(lin, [30.0, 60.0]).value == pytest.approx(3.0)
    quad = FusionRule("optimal", False, [2.0, 1.0], offsets=[1.0, 0.0])
    assert fuse(quad, [3.0, -2.0]).value == pytest.approx(12.0)
    masked = FusionRule("equal", True, [0.0, 1.0], offsets=[0.0, 0.0], censored=[True, False])
    assert fuse(masked, [np.nan, 2.0]).value == 4.0
    with pytest.raises(ValueError):
        fuse(lin, [1.0, 2.0, 3.0])


def test_fuse_array_matches_loop(scenario):
    gen = np.random.default_rng(0)
    t = gen.uniform(0, 20, size=(50, scenario.m))
    for family in ("optimal", "linear"):
        rule = make_rule(family, scenario, quantized=False)
        expected = [fuse(rule, row).value for row in t]
        np.testing.assert_allclose(fuse_array(rule, t), expected, rtol=1e-13)


@settings(max_examples=50, deadline=None)
@given(perm_seed=st.integers(0, 2**32 - 1))
def test_fuse_is_permutation_equivariant(perm_seed):
    gen = np.random.default_rng(perm_seed)
    weights, offsets, t = gen.uniform(0.1, 2, 6), gen.uniform(0, 5, 6), gen.uniform(0, 10, 6)
    perm = gen.permutation(6)
    a = fuse(FusionRule("optimal", False, weights, offsets), t).value
    b = fuse(FusionRule("optimal", False, weights[perm], offsets[perm]), t[perm]).value
    assert a == pytest.approx(b, rel=1e-12)


def test_scaled_rule_keeps_decisions_and_roc(scenario):
    rule = make_rule("optimal", scenario)
    big = rule.scaled(7.5)
    grid = [0.01, 0.1, 0.5, 0.9]
    np.testing.assert_allclose(roc_curve(big, scenario, grid).p_d, roc_curve(rule, scenario, grid).p_d, atol=1e-10)
    stats = w.simulate_statistics(scenario, 1, 500, seed=2, quantized=True)
    thr = w.threshold_for_pfa(w.fusion_moments(rule, scenario), 0.1)
    thr_big = w.threshold_for_pfa(w.fusion_moments(big, scenario), 0.1)
    np.testing.assert_array_equal(fuse_array(rule, stats) >= thr, fuse_array(big, stats) >= thr_big)
    with pytest.raises(ValueError):
        rule.scaled(0.0)
