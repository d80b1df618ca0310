"""Capacity-limited bit budgets and uniform quantization of local statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class CensoredSensorError(ValueError):
    """Raised when a zero-bit (censored) sensor is asked to quantize."""


def bits_for_power(tx_power: float, channel_gain: float, comm_noise_var: float) -> int:
    """Largest integer bit count the reporting channel can carry.

    ``floor(0.5 * log2(1 + p h^2 / zeta))``
    """
    if not comm_noise_var > 0:
        raise ValueError("comm_noise_var must be > 0")
    if tx_power < 0 or channel_gain < 0:
        raise ValueError("tx_power and channel_gain must be >= 0")
    snr = tx_power * channel_gain**2 / comm_noise_var
    return int(math.floor(0.5 * math.log2(1.0 + snr)))


def bits_for_power_array(tx_power, channel_gain, comm_noise_var) -> np.ndarray:
    """Vectorized :func:`bits_for_power`."""
    snr = np.asarray(tx_power, dtype=float) * np.asarray(channel_gain, dtype=float) ** 2
    snr = snr / np.asarray(comm_noise_var, dtype=float)
    return np.floor(0.5 * np.log2(1.0 + snr)).astype(int)


def min_power_for_bits(bits: int, channel_gain: float, comm_noise_var: float) -> float:
    """Smallest transmit power for which :func:`bits_for_power` returns ``bits``.

    Infinite for a dead channel (zero gain) unless ``bits == 0``.
    """
    if bits <= 0:
        return 0.0
    if channel_gain == 0:
        return math.inf
    p = comm_noise_var * (4.0**bits - 1.0) / channel_gain**2
    # round-off can put the closed form a few ulps off the true boundary
    while bits_for_power(p, channel_gain, comm_noise_var) < bits:
        p = math.nextafter(p, math.inf)
    while p > 0 and bits_for_power(math.nextafter(p, 0.0), channel_gain, comm_noise_var) >= bits:
        p = math.nextafter(p, 0.0)
    return p


@dataclass(frozen=True)
class QuantizerSpec:
    """Uniform quantizer of half-range ``half_range`` with ``bits`` bits.

    ``additive`` mode models quantization as independent uniform noise of
    the matching variance; ``explicit`` mode rounds to a mid-rise codebook
    spanning ``[center - half_range, center + half_range]``.
    """

    half_range: float
    bits: int
    center: float = 0.0
    mode: str = "additive"

    def __post_init__(self):
        if not self.half_range > 0:
            raise ValueError("half_range must be > 0")
        if int(self.bits) != self.bits or self.bits < 0:
            raise ValueError("bits must be a nonnegative integer")
        if self.mode not in ("additive", "explicit"):
            raise ValueError(f"unknown quantizer mode {self.mode!r}")

    @property
    def censored(self) -> bool:
        return self.bits == 0

    @property
    def step(self) -> float:
        self._require_bits()
        return 2.0 * self.half_range / 2.0**self.bits

    def noise_variance(self) -> float:
        return quant_noise_variance(self)

    def codebook(self) -> np.ndarray:
        levels = 2**self.bits
        return self.center - self.half_range + self.step * (np.arange(levels) + 0.5)

    def _require_bits(self):
        if self.bits == 0:
            raise CensoredSensorError("censored sensor (0 bits) has no quantizer output")


def quant_noise_variance(spec: QuantizerSpec) -> float:
    """Variance ``B^2 / (3 * 2^(2L))`` of the uniform quantization error."""
    spec._require_bits()
    return spec.half_range**2 / (3.0 * 4.0**spec.bits)


def quantize(statistic, spec: QuantizerSpec, gen: np.random.Generator | None = None):
    """Quantize one statistic or an array of them.

    Additive mode needs ``gen`` and adds uniform noise on
    ``[-step/2, step/2]``; explicit mode is deterministic.
    """
    spec._require_bits()
    t = np.asarray(statistic, dtype=float)
    if spec.mode == "additive":
        if gen is None:
            raise ValueError("additive-noise quantization needs a random generator")
        half = spec.step / 2.0
        out = t + gen.uniform(-half, half, size=t.shape)
    else:
        levels = 2**spec.bits
        low = spec.center - spec.half_range
        k = np.clip(np.floor((t - low) / spec.step), 0, levels - 1)
        out = low + spec.step * (k + 0.5)
    return float(out) if out.ndim == 0 else out
