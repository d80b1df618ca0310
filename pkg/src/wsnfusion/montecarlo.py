"""End-to-end Monte Carlo: sample -> energy -> quantize -> fuse -> threshold.

Trials are drawn in fixed blocks, each with its own substream keyed by
(seed, noise kind, hypothesis, block). The block partition does not depend
on the worker count, so serial and threaded runs return identical vectors.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from . import rng as _rng
from .analytics import DetectionCurve
from .fusion import FusionRule, fuse_array
from .scenario import Hypothesis, Scenario, sample_energies


@dataclass(frozen=True)
class TrialBatch:
    scenario: Scenario
    rule: FusionRule
    n_trials: int
    hypothesis: Hypothesis
    seed: int = 0

    def __post_init__(self):
        if int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise ValueError("n_trials must be a positive integer")
        object.__setattr__(self, "hypothesis", Hypothesis(self.hypothesis))


def _quantize_block(scenario: Scenario, t: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    """Quantize a ``(size, M)`` block; censored columns become NaN."""
    u = gen.uniform(-0.5, 0.5, size=t.shape) if scenario.quant_mode == "additive" else None
    out = np.full_like(t, np.nan)
    for i, site in enumerate(scenario.sites):
        if site.bits == 0:
            continue
        spec = scenario.quantizer(i)
        if u is not None:
            out[:, i] = t[:, i] + spec.step * u[:, i]
        else:
            low = spec.center - spec.half_range
            k = np.clip(np.floor((t[:, i] - low) / spec.step), 0, 2**spec.bits - 1)
            out[:, i] = low + spec.step * (k + 0.5)
    return out


def _block(scenario, hypothesis, seed, quantized, block):
    b, start, stop = block
    gen = _rng.substream(seed, _rng.MEASUREMENT, int(hypothesis), b)
    t = sample_energies(scenario, hypothesis, gen, stop - start)
    if quantized:
        t = _quantize_block(scenario, t, _rng.substream(seed, _rng.QUANTIZATION, int(hypothesis), b))
    return t


def simulate_statistics(
    scenario: Scenario,
    hypothesis: Hypothesis,
    n_trials: int,
    seed: int = 0,
    quantized: bool = False,
    workers: int = 1,
) -> np.ndarray:
    """Per-sensor statistics for ``n_trials`` trials, shape ``(n_trials, M)``.

    With ``quantized=True`` the statistics pass through each sensor's
    quantizer and censored sensors are NaN.
    """
    hypothesis = Hypothesis(hypothesis)
    blocks = _rng.trial_blocks(n_trials)

    def work(block):
        return _block(scenario, hypothesis, seed, quantized, block)

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(b) for b in blocks]
    return np.concatenate(parts, axis=0)


def run_trials(batch: TrialBatch, workers: int = 1) -> np.ndarray:
    """Fused statistic of every trial in ``batch``."""
    stats = simulate_statistics(
        batch.scenario, batch.hypothesis, batch.n_trials, batch.seed, batch.rule.quantized, workers
    )
    return fuse_array(batch.rule, stats)


@dataclass(frozen=True)
class RateEstimate:
    p_fa: float
    p_d: float
    p_fa_ci: tuple[float, float]
    p_d_ci: tuple[float, float]


def empirical_rates(h0_values, h1_values, threshold: float, alpha: float = 0.05) -> RateEstimate:
    """Exceedance fractions (``>= threshold``) with Wilson intervals."""
    h0 = np.asarray(h0_values, dtype=float)
    h1 = np.asarray(h1_values, dtype=float)
    if h0.size == 0 or h1.size == 0:
        raise ValueError("need at least one value per hypothesis")
    k0 = int(np.count_nonzero(h0 >= threshold))
    k1 = int(np.count_nonzero(h1 >= threshold))
    ci0 = proportion_confint(k0, h0.size, alpha=alpha, method="wilson")
    ci1 = proportion_confint(k1, h1.size, alpha=alpha, method="wilson")
    return RateEstimate(k0 / h0.size, k1 / h1.size, tuple(map(float, ci0)), tuple(map(float, ci1)))


def empirical_threshold(h0_values, p_fa: float) -> float:
    """Threshold leaving a fraction ``ceil(p_fa * n) / n`` of H0 values at or above it."""
    if not 0 < p_fa <= 1:
        raise ValueError(f"p_fa must lie in (0, 1], got {p_fa}")
    if p_fa >= 1:
        return -math.inf
    h0 = np.sort(np.asarray(h0_values, dtype=float))[::-1]
    k = max(1, math.ceil(p_fa * h0.size - 1e-9))
    return float(h0[k - 1])


def empirical_roc(
    scenario: Scenario,
    rule: FusionRule,
    n_trials: int,
    p_fa_grid: Sequence[float],
    seed: int = 0,
    workers: int = 1,
    return_values: bool = False,
):
    """ROC estimated from H0 quantile thresholds and H1 exceedances."""
    grid = np.asarray(p_fa_grid, dtype=float)
    h0 = run_trials(TrialBatch(scenario, rule, n_trials, Hypothesis.H0, seed), workers)
    h1 = run_trials(TrialBatch(scenario, rule, n_trials, Hypothesis.H1, seed), workers)
    pd = [float(np.mean(h1 >= empirical_threshold(h0, p))) for p in grid]
    curve = DetectionCurve(grid, pd, rule.name, "empirical", {"n_trials": n_trials, "seed": seed})
    if return_values:
        return curve, h0, h1
    return curve


def write_statistics_csv(path, **columns) -> None:
    """Write equal-length raw statistic vectors as CSV columns."""
    arrays = {k: np.asarray(v, dtype=float).ravel() for k, v in columns.items()}
    lengths = {a.size for a in arrays.values()}
    if len(lengths) > 1:
        raise ValueError("all columns must have the same length")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", *arrays])
        for i, row in enumerate(zip(*arrays.values())):
            writer.writerow([i, *map(repr, map(float, row))])
