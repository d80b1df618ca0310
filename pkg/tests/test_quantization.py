import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsnfusion.quantization import (
    CensoredSensorError,
    QuantizerSpec,
    bits_for_power,
    bits_for_power_array,
    min_power_for_bits,
    quant_noise_variance,
    quantize,
)


@pytest.mark.parametrize(
    "snr, bits",
    [(0.0, 0), (2.999, 0), (3.0, 1), (14.99, 1), (15.0, 2), (63.0, 3), (4.0**8 - 1, 8)],
)
def test_bits_follow_capacity_boundaries(snr, bits):
    assert bits_for_power(snr, 1.0, 1.0) == bits


def test_bits_vectorized_matches_scalar():
    gen = np.random.default_rng(0)
    p = gen.exponential(3.0, 500)
    h = gen.rayleigh(1.0, 500)
    expected = [bits_for_power(a, b, 0.1) for a, b in zip(p, h)]
    np.testing.assert_array_equal(bits_for_power_array(p, h, 0.1), expected)


def test_bits_reject_bad_inputs():
    with pytest.raises(ValueError):
        bits_for_power(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        bits_for_power(-1.0, 1.0, 0.1)


@settings(max_examples=200, deadline=None)
@given(
    bits=st.integers(1, 30),
    gain=st.floats(1e-3, 10.0),
    zeta=st.floats(1e-3, 10.0),
)
def test_min_power_is_the_exact_boundary(bits, gain, zeta):
    p = min_power_for_bits(bits, gain, zeta)
    assert bits_for_power(p, gain, zeta) == bits
    assert bits_for_power(math.nextafter(p, 0.0), gain, zeta) < bits


def test_min_power_edge_cases():
    assert min_power_for_bits(0, 0.0, 0.1) == 0.0
    assert min_power_for_bits(2, 0.0, 0.1) == math.inf
    assert min_power_for_bits(1, 1.0, 0.1) == pytest.approx(0.3, rel=1e-12)


@pytest.mark.parametrize("bits", [1, 2, 3, 8])
def test_noise_variance_formula(bits):
    spec = QuantizerSpec(0.5, bits)
    assert quant_noise_variance(spec) == pytest.approx(0.25 / (3 * 4**bits), rel=1e-15)
    # variance of the uniform error on one step
    assert quant_noise_variance(spec) == pytest.approx(spec.step**2 / 12, rel=1e-12)


def test_additive_noise_has_the_model_variance():
    spec = QuantizerSpec(0.5, 2)
    gen = np.random.default_rng(1)
    out = quantize(np.zeros(400_000), spec, gen)
    assert np.max(np.abs(out)) <= spec.step / 2
    assert out.var() == pytest.approx(spec.noise_variance(), rel=0.01)


def test_additive_needs_generator():
    with pytest.raises(ValueError):
        quantize(1.0, QuantizerSpec(0.5, 2))


def test_explicit_codebook_is_mid_rise_and_clips():
    spec = QuantizerSpec(1.0, 2, center=5.0, mode="explicit")
    np.testing.assert_allclose(spec.codebook(), [4.25, 4.75, 5.25, 5.75])
    out = quantize(np.array([-10.0, 4.3, 5.0, 5.49, 100.0]), spec)
    np.testing.assert_allclose(out, [4.25, 4.25, 5.25, 5.25, 5.75])
    assert isinstance(quantize(5.1, spec), float)


@settings(max_examples=100, deadline=None)
@given(x=st.floats(-0.99, 0.99), bits=st.integers(1, 12))
def test_explicit_error_within_half_step(x, bits):
    spec = QuantizerSpec(1.0, bits, mode="explicit")
    assert abs(quantize(x, spec) - x) <= spec.step / 2 + 1e-12


def test_censored_quantizer_refuses():
    spec = QuantizerSpec(0.5, 0)
    assert spec.censored
    with pytest.raises(CensoredSensorError):
        quant_noise_variance(spec)
    with pytest.raises(CensoredSensorError):
        quantize(1.0, spec, np.random.default_rng(0))


@pytest.mark.parametrize("kwargs", [{"half_range": 0.0, "bits": 1}, {"half_range": 1.0, "bits": -1},
                                    {"half_range": 1.0, "bits": 1.5}, {"half_range": 1.0, "bits": 1, "mode": "x"}])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        QuantizerSpec(**kwargs)
