import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

import wsnfusion as w
from wsnfusion._validation import check_labels, check_probability, check_statistics
from wsnfusion.estimators import FusionDetector, PowerAllocator
from wsnfusion.montecarlo import empirical_threshold


def test_params_and_clone(scenario):
    det = FusionDetector(scenario, rule="linear", p_fa=0.05)
    params = det.get_params()
    assert params["rule"] == "linear" and params["p_fa"] == 0.05
    twin = clone(det)
    assert twin.get_params()["scenario"] == scenario
    det.set_params(rule="equal")
    assert det.rule == "equal"


def test_analytic_threshold(scenario):
    det = FusionDetector(scenario, rule="optimal").fit()
    moments = w.fusion_moments(det.rule_, scenario)
    assert det.threshold_ == pytest.approx(w.threshold_for_pfa(moments, 0.1))
    assert det.pd_analytic_ == pytest.approx(w.pd_closed_form(moments, 0.1))


def test_predict_and_transform_agree(scenario):
    det = FusionDetector(scenario, rule="linear").fit()
    X = w.simulate_statistics(scenario, 1, 300, seed=2, quantized=True)
    fused = det.transform(X)
    assert fused.shape == (300, 1)
    np.testing.assert_array_equal(det.predict(X), (fused[:, 0] >= det.threshold_).astype(int))
    np.testing.assert_allclose(det.decision_function(X), fused[:, 0] - det.threshold_)


def test_empirical_threshold_mode(scenario):
    h0 = w.simulate_statistics(scenario, 0, 4000, seed=1, quantized=True)
    h1 = w.simulate_statistics(scenario, 1, 4000, seed=1, quantized=True)
    det = FusionDetector(scenario, rule="optimal", threshold_mode="empirical").fit(h0)
    assert det.predict(h0).mean() == pytest.approx(0.1, abs=1e-3)
    expected = empirical_threshold(w.fuse_array(det.rule_, h0), 0.1)
    assert det.threshold_ == expected
    X = np.vstack([h0, h1])
    y = np.r_[np.zeros(4000), np.ones(4000)]
    labelled = FusionDetector(scenario, rule="optimal", threshold_mode="empirical").fit(X, y)
    assert labelled.threshold_ == expected
    assert 0.5 < labelled.score(X, y) < 1.0


def test_detector_validation(scenario):
    with pytest.raises(TypeError):
        FusionDetector(None).fit()
    with pytest.raises(ValueError):
        FusionDetector(scenario, rule="median").fit()
    with pytest.raises(ValueError):
        FusionDetector(scenario, p_fa=1.0).fit()
    with pytest.raises(ValueError):
        FusionDetector(scenario, threshold_mode="magic").fit()
    with pytest.raises(ValueError):
        FusionDetector(scenario, threshold_mode="empirical").fit()
    with pytest.raises(NotFittedError):
        FusionDetector(scenario).predict(np.zeros((2, scenario.m)))
    det = FusionDetector(scenario).fit()
    with pytest.raises(ValueError):
        det.predict(np.zeros((2, scenario.m + 1)))


def test_power_allocator(scenario):
    alloc = PowerAllocator(budget=8.0).fit(scenario)
    ref = w.branch_and_bound(scenario, 8.0)
    np.testing.assert_array_equal(alloc.bits_, ref.bits)
    np.testing.assert_allclose(alloc.predict(), ref.powers)
    assert alloc.score() == pytest.approx(ref.objective)
    np.testing.assert_array_equal(alloc.scenario_.bits, ref.bits)
    assert clone(alloc).get_params() == {"budget": 8.0, "p_fa": 0.1, "tol": 1e-4, "max_nodes": 100_000}
    with pytest.raises(TypeError):
        PowerAllocator().fit(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        PowerAllocator(budget=0).fit(scenario)


def test_validation_helpers():
    X = check_statistics([[1.0, np.nan], [2.0, 3.0]], 2)
    assert X.dtype == np.float64
    with pytest.raises(ValueError):
        check_statistics([[1.0, np.inf]])
    with pytest.raises(ValueError):
        check_statistics([1.0, 2.0])
    assert check_probability(1.0, closed=True) == 1.0
    with pytest.raises(ValueError):
        check_probability(0.0)
    np.testing.assert_array_equal(check_labels([0, 1, 1], 3), [0, 1, 1])
    with pytest.raises(ValueError):
        check_labels([0, 2], 2)
    with pytest.raises(ValueError):
        check_labels([0], 2)
