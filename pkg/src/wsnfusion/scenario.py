"""Network scenario, measurement model and the per-sensor energy statistic."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import rng as _rng
from .quantization import QuantizerSpec, bits_for_power


class Hypothesis(enum.IntEnum):
    H0 = 0
    H1 = 1


@dataclass(frozen=True)
class SensorSite:
    """Local parameters of one sensor node.

    ``signal_energy`` is the signature energy summed over the observation
    window; the per-sensor SNR follows from it and the window length.
    """

    noise_var: float
    signal_energy: float
    channel_gain: float = 1.0
    comm_noise_var: float = 0.1
    tx_power: float = 0.0
    bits: int = 0

    def __post_init__(self):
        if not self.noise_var > 0:
            raise ValueError(f"noise_var must be > 0, got {self.noise_var}")
        if not self.comm_noise_var > 0:
            raise ValueError(f"comm_noise_var must be > 0, got {self.comm_noise_var}")
        if self.signal_energy < 0 or not math.isfinite(self.signal_energy):
            raise ValueError(f"signal_energy must be finite and >= 0, got {self.signal_energy}")
        if self.channel_gain < 0 or self.tx_power < 0:
            raise ValueError("channel_gain and tx_power must be >= 0")
        if int(self.bits) != self.bits or self.bits < 0:
            raise ValueError(f"bits must be a nonnegative integer, got {self.bits}")
        object.__setattr__(self, "bits", int(self.bits))

    @property
    def censored(self) -> bool:
        return self.bits == 0

    @property
    def channel_quality(self) -> float:
        """h^2 / zeta, the power-to-SNR factor of the reporting link."""
        return self.channel_gain**2 / self.comm_noise_var


def site_snr(site: SensorSite, n_samples: int) -> float:
    """SNR of one sensor: signal energy over accumulated noise power."""
    return site.signal_energy / (n_samples * site.noise_var)


@dataclass(frozen=True)
class Scenario:
    """A sensor network observing one (constant) signature.

    The quantizer configuration is network-wide: every sensor uses the same
    half-range ``quant_half_range`` and mode, and its own bit budget.
    """

    sites: tuple[SensorSite, ...]
    n_samples: int
    amplitude: float = 0.1
    quant_half_range: float = 0.5
    rng_seed: int = 0
    quant_mode: str = "additive"
    quant_center: tuple[float, ...] | None = None
    gain_model: str = "rayleigh"
    noise_var_range: tuple[float, float] = (0.1, 1.0)
    target_avg_snr_db: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        if len(self.sites) < 1:
            raise ValueError("a scenario needs at least one sensor")
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ValueError(f"n_samples must be a positive integer, got {self.n_samples}")
        object.__setattr__(self, "n_samples", int(self.n_samples))
        if not self.quant_half_range > 0:
            raise ValueError("quant_half_range must be > 0")
        if self.quant_mode not in ("additive", "explicit"):
            raise ValueError(f"quant_mode must be 'additive' or 'explicit', got {self.quant_mode!r}")
        if self.quant_center is not None:
            centers = tuple(float(c) for c in self.quant_center)
            if len(centers) != len(self.sites):
                raise ValueError("quant_center needs one entry per sensor")
            object.__setattr__(self, "quant_center", centers)

    # -- derived per-sensor arrays -------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.sites)

    @property
    def noise_var(self) -> np.ndarray:
        return np.array([s.noise_var for s in self.sites])

    @property
    def snr(self) -> np.ndarray:
        return np.array([site_snr(s, self.n_samples) for s in self.sites])

    @property
    def channel_gain(self) -> np.ndarray:
        return np.array([s.channel_gain for s in self.sites])

    @property
    def comm_noise_var(self) -> np.ndarray:
        return np.array([s.comm_noise_var for s in self.sites])

    @property
    def tx_power(self) -> np.ndarray:
        return np.array([s.tx_power for s in self.sites])

    @property
    def bits(self) -> np.ndarray:
        return np.array([s.bits for s in self.sites], dtype=int)

    @property
    def avg_snr_db(self) -> float:
        mean = float(np.mean(self.snr))
        return 10 * math.log10(mean) if mean > 0 else -math.inf

    def quantizer(self, i: int) -> QuantizerSpec:
        site = self.sites[i]
        if self.quant_center is not None:
            center = self.quant_center[i]
        else:
            center = self.n_samples * site.noise_var
        return QuantizerSpec(self.quant_half_range, site.bits, center, self.quant_mode)

    def quant_noise_var(self) -> np.ndarray:
        """Per-sensor quantization noise variance; NaN marks censored sensors."""
        out = np.full(self.m, np.nan)
        for i, site in enumerate(self.sites):
            if site.bits > 0:
                out[i] = self.quantizer(i).noise_variance()
        return out

    # -- functional updates --------------------------------------------------------

    def with_powers(self, powers: Sequence[float]) -> "Scenario":
        """Copy with new transmit powers and the bit budgets they buy."""
        powers = np.broadcast_to(np.asarray(powers, dtype=float), (self.m,))
        sites = tuple(
            replace(s, tx_power=float(p), bits=bits_for_power(p, s.channel_gain, s.comm_noise_var))
            for s, p in zip(self.sites, powers)
        )
        return replace(self, sites=sites)

    def with_bits(self, bits: Sequence[int]) -> "Scenario":
        bits = np.broadcast_to(np.asarray(bits), (self.m,))
        return replace(self, sites=tuple(replace(s, bits=int(b)) for s, b in zip(self.sites, bits)))

    def with_n_samples(self, n: int) -> "Scenario":
        """Copy observing ``n`` samples; per-sample signal power is kept."""
        ratio = n / self.n_samples
        sites = tuple(replace(s, signal_energy=s.signal_energy * ratio) for s in self.sites)
        return replace(self, sites=sites, n_samples=int(n), quant_center=None)

    def rescaled(self, factor: float) -> "Scenario":
        """Copy with every noise variance multiplied by ``factor``."""
        sites = tuple(replace(s, noise_var=s.noise_var * factor) for s in self.sites)
        return replace(self, sites=sites, quant_center=None)

    def with_avg_snr_db(self, target_db: float) -> "Scenario":
        """Rescale all noise variances by one factor to hit ``target_db``."""
        mean = float(np.mean(self.snr))
        if mean <= 0:
            raise ValueError("cannot rescale a zero-signal scenario to a target SNR")
        out = self.rescaled(mean / 10 ** (target_db / 10))
        return replace(out, target_avg_snr_db=float(target_db))


# -- channel gain models -------------------------------------------------------------


def parse_gain_model(descriptor: str) -> tuple[str, tuple[float, ...]]:
    """Parse ``name[:p1,p2]`` into a name and parameters.

    Supported: ``rayleigh[:mean_square]``, ``constant:value``,
    ``uniform:low,high``.
    """
    name, _, rest = str(descriptor).strip().partition(":")
    name = name.strip().lower()
    params = tuple(float(v) for v in rest.split(",") if v.strip()) if rest else ()
    if name == "rayleigh":
        if len(params) > 1 or (params and params[0] <= 0):
            raise ValueError(f"bad rayleigh gain model {descriptor!r}")
    elif name == "constant":
        if len(params) != 1 or params[0] < 0:
            raise ValueError(f"bad constant gain model {descriptor!r}")
    elif name == "uniform":
        if len(params) != 2 or not 0 <= params[0] <= params[1]:
            raise ValueError(f"bad uniform gain model {descriptor!r}")
    else:
        raise ValueError(f"unknown gain model {descriptor!r}")
    return name, params


def draw_gains(descriptor: str, m: int, gen: np.random.Generator) -> np.ndarray:
    name, params = parse_gain_model(descriptor)
    if name == "rayleigh":
        mean_square = params[0] if params else 1.0
        # |h|^2 is exponential with the requested mean
        return np.sqrt(gen.exponential(mean_square, size=m))
    if name == "constant":
        return np.full(m, params[0])
    return gen.uniform(params[0], params[1], size=m)


def generate_scenario(
    m: int,
    n: int,
    amplitude: float = 0.1,
    target_avg_snr_db: float | None = -8.5,
    noise_var_range: tuple[float, float] = (0.1, 1.0),
    gain_model: str = "rayleigh",
    comm_noise_var: float = 0.1,
    seed: int = 0,
    *,
    quant_half_range: float = 0.5,
    tx_power: float | Sequence[float] = 2.0,
    bits: int | Sequence[int] | None = None,
    noise_var: Sequence[float] | None = None,
    channel_gain: Sequence[float] | None = None,
    quant_mode: str = "additive",
    quant_center: Sequence[float] | None = None,
) -> Scenario:
    """Build a random network with a prescribed average SNR.

    Noise variances are drawn uniformly on ``noise_var_range`` (or taken from
    ``noise_var``) and then multiplied by one common factor so the average
    SNR equals ``target_avg_snr_db``. Draws are sequential, so the first
    ``k`` sensors of an ``m``-sensor network match a ``k``-sensor network
    with the same seed before rescaling.

    Bit budgets come from ``tx_power`` through the capacity rule unless
    ``bits`` is given explicitly.
    """
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    lo, hi = (float(v) for v in noise_var_range)
    if not 0 < lo <= hi:
        raise ValueError(f"noise_var_range must satisfy 0 < low <= high, got {noise_var_range}")
    if not comm_noise_var > 0:
        raise ValueError("comm_noise_var must be > 0")

    if noise_var is None:
        variances = _rng.substream(seed, _rng.SCENARIO, 0).uniform(lo, hi, size=m)
    else:
        variances = np.asarray(noise_var, dtype=float)
        if variances.shape != (m,) or np.any(variances <= 0):
            raise ValueError("noise_var must list m positive values")
    if channel_gain is None:
        gains = draw_gains(gain_model, m, _rng.substream(seed, _rng.SCENARIO, 1))
    else:
        gains = np.asarray(channel_gain, dtype=float)
        if gains.shape != (m,) or np.any(gains < 0):
            raise ValueError("channel_gain must list m nonnegative values")
    if target_avg_snr_db is not None:
        if amplitude == 0:
            raise ValueError("a target SNR needs a nonzero amplitude")
        raw_snr = amplitude**2 / variances
        variances = variances * (np.mean(raw_snr) / 10 ** (target_avg_snr_db / 10))

    powers = np.broadcast_to(np.asarray(tx_power, dtype=float), (m,))
    if bits is None:
        budget = [bits_for_power(p, h, comm_noise_var) for p, h in zip(powers, gains)]
    else:
        budget = np.broadcast_to(np.asarray(bits), (m,))
    sites = tuple(
        SensorSite(
            noise_var=float(v),
            signal_energy=n * amplitude**2,
            channel_gain=float(h),
            comm_noise_var=float(comm_noise_var),
            tx_power=float(p),
            bits=int(b),
        )
        for v, h, p, b in zip(variances, gains, powers, budget)
    )
    return Scenario(
        sites=sites,
        n_samples=int(n),
        amplitude=float(amplitude),
        quant_half_range=float(quant_half_range),
        rng_seed=int(seed),
        quant_mode=quant_mode,
        quant_center=None if quant_center is None else tuple(quant_center),
        gain_model=gain_model,
        noise_var_range=(lo, hi),
        target_avg_snr_db=target_avg_snr_db,
    )


# -- measurements ----------------------------------------------------------------


def _signal_level(scenario: Scenario) -> np.ndarray:
    return np.sqrt(np.array([s.signal_energy for s in scenario.sites]) / scenario.n_samples)


def sample_measurements(
    scenario: Scenario, site_index: int, hypothesis: Hypothesis, gen: np.random.Generator
) -> np.ndarray:
    """Draw the N raw samples of one sensor under ``hypothesis``."""
    site = scenario.sites[site_index]
    x = gen.normal(0.0, math.sqrt(site.noise_var), size=scenario.n_samples)
    if Hypothesis(hypothesis) is Hypothesis.H1:
        x += _signal_level(scenario)[site_index]
    return x


def sample_energies(
    scenario: Scenario, hypothesis: Hypothesis, gen: np.random.Generator, size: int
) -> np.ndarray:
    """Energy statistics of all sensors for ``size`` trials, shape ``(size, M)``."""
    sigma = np.sqrt(scenario.noise_var)
    x = gen.standard_normal((size, scenario.m, scenario.n_samples))
    x *= sigma[None, :, None]
    if Hypothesis(hypothesis) is Hypothesis.H1:
        x += _signal_level(scenario)[None, :, None]
    return np.einsum("tmn,tmn->tm", x, x)


def energy_statistic(samples) -> float:
    """Sum of squared magnitudes of the samples."""
    x = np.asarray(samples)
    if x.size == 0:
        raise ValueError("energy statistic of an empty sample vector")
    return float(np.sum(np.abs(x) ** 2))


# -- flat config round trip --------------------------------------------------------

SCENARIO_DEFAULTS = {
    "m": 10,
    "n": 10,
    "amplitude": 0.1,
    "target_avg_snr_db": -8.5,
    "noise_var_range": [0.1, 1.0],
    "gain_model": "rayleigh",
    "comm_noise_var": 0.1,
    "seed": 0,
    "quant_half_range": 0.5,
    "quant_mode": "additive",
    "quant_center": None,
    "tx_power": 2.0,
    "bits": None,
    "noise_var": None,
    "channel_gain": None,
}


def scenario_from_config(values: dict) -> Scenario:
    """Build a scenario from flat config values (missing keys take defaults)."""
    cfg = {**SCENARIO_DEFAULTS, **{k: v for k, v in values.items() if k in SCENARIO_DEFAULTS}}
    return generate_scenario(
        int(cfg["m"]),
        int(cfg["n"]),
        amplitude=float(cfg["amplitude"]),
        target_avg_snr_db=None if cfg["target_avg_snr_db"] is None else float(cfg["target_avg_snr_db"]),
        noise_var_range=tuple(cfg["noise_var_range"]),
        gain_model=str(cfg["gain_model"]),
        comm_noise_var=float(cfg["comm_noise_var"]),
        seed=int(cfg["seed"]),
        quant_half_range=float(cfg["quant_half_range"]),
        tx_power=cfg["tx_power"],
        bits=cfg["bits"],
        noise_var=cfg["noise_var"],
        channel_gain=cfg["channel_gain"],
        quant_mode=str(cfg["quant_mode"]),
        quant_center=cfg["quant_center"],
    )


def scenario_to_config(scenario: Scenario) -> dict:
    """Flat config that rebuilds ``scenario`` exactly (per-site lists are explicit)."""
    return {
        "m": scenario.m,
        "n": scenario.n_samples,
        "amplitude": scenario.amplitude,
        "target_avg_snr_db": None,
        "noise_var_range": list(scenario.noise_var_range),
        "gain_model": scenario.gain_model,
        "comm_noise_var": float(scenario.sites[0].comm_noise_var),
        "seed": scenario.rng_seed,
        "quant_half_range": scenario.quant_half_range,
        "quant_mode": scenario.quant_mode,
        "quant_center": None if scenario.quant_center is None else list(scenario.quant_center),
        "tx_power": scenario.tx_power.tolist(),
        "bits": scenario.bits.tolist(),
        "noise_var": scenario.noise_var.tolist(),
        "channel_gain": scenario.channel_gain.tolist(),
    }
