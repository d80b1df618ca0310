"""Soft-decision fusion rules: per-sensor weights/offsets and the fused statistic.

Quadratic families fuse ``sum_i a_i (T_i - b_i)^2``; linear families fuse
``sum_i alpha_i T_i``. Every family has a quantized counterpart whose weights
account for the quantization noise variance of each sensor. Censored
sensors (zero bits) carry weight 0 and are skipped by :func:`fuse`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import Scenario

QUADRATIC = ("optimal", "weighted", "equal")
LINEAR = ("linear", "equal-linear")
FAMILIES = QUADRATIC + LINEAR


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FusionRule:
    family: str
    quantized: bool
    weights: np.ndarray
    offsets: np.ndarray | None = None
    censored: np.ndarray | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown fusion family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "weights", _frozen(self.weights))
        m = self.weights.shape[0]
        if self.is_quadratic:
            if self.offsets is None or len(self.offsets) != m:
                raise ValueError("quadratic rules need one offset per sensor")
            object.__setattr__(self, "offsets", _frozen(self.offsets))
        elif self.offsets is not None and len(self.offsets):
            raise ValueError("linear rules carry no offsets")
        else:
            object.__setattr__(self, "offsets", None)
        censored = np.zeros(m, bool) if self.censored is None else np.array(self.censored, bool)
        if censored.shape != (m,):
            raise ValueError("censored mask length must match weights")
        if np.any(self.weights[censored] != 0):
            raise ValueError("censored sensors must carry weight 0")
        censored.setflags(write=False)
        object.__setattr__(self, "censored", censored)

    @property
    def is_quadratic(self) -> bool:
        return self.family in QUADRATIC

    @property
    def m(self) -> int:
        return self.weights.shape[0]

    @property
    def name(self) -> str:
        return f"{self.family}{'-q' if self.quantized else ''}"

    def scaled(self, factor: float) -> "FusionRule":
        """Copy with every weight multiplied by ``factor`` (> 0)."""
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        return FusionRule(self.family, self.quantized, self.weights * factor, self.offsets, self.censored)


@dataclass(frozen=True)
class FusedStatistic:
    value: float
    rule: FusionRule


# -- unquantized rules -------------------------------------------------------------


def _snr_and_var(scenario: Scenario) -> tuple[np.ndarray, np.ndarray, int]:
    return scenario.snr, scenario.noise_var, scenario.n_samples


def optimal_weights(scenario: Scenario) -> FusionRule:
    xi, var, n = _snr_and_var(scenario)
    a = xi / (n * var**2 * (1 + 2 * xi))
    return FusionRule("optimal", False, a, n * var / 2)


def weighted_weights(scenario: Scenario) -> FusionRule:
    """High-SNR limit of the optimal weights; needs only the noise powers."""
    _, var, n = _snr_and_var(scenario)
    return FusionRule("weighted", False, 1.0 / (2 * n * var**2), n * var / 2)


def equal_weights(scenario: Scenario) -> FusionRule:
    _, var, n = _snr_and_var(scenario)
    return FusionRule("equal", False, np.ones(scenario.m), n * var / 2)


def linear_weights(scenario: Scenario) -> FusionRule:
    xi, var, n = _snr_and_var(scenario)
    return FusionRule("linear", False, xi / (n * var * (1 + 2 * xi)))


def equal_linear_weights(scenario: Scenario) -> FusionRule:
    return FusionRule("equal-linear", False, np.ones(scenario.m))


_UNQUANTIZED = {
    "optimal": optimal_weights,
    "weighted": weighted_weights,
    "equal": equal_weights,
    "linear": linear_weights,
    "equal-linear": equal_linear_weights,
}


# -- quantized rules ---------------------------------------------------------------


def quantized_weights(family: str, scenario: Scenario, quant_var=None) -> FusionRule:
    """Weights of the quantized rule ``family``.

    ``quant_var`` overrides the per-sensor quantization noise variances
    (default: from each sensor's bit budget). NaN entries, and sensors with
    zero bits, are censored.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown fusion family {family!r}; expected one of {FAMILIES}")
    xi, var, n = _snr_and_var(scenario)
    if quant_var is None:
        qv = scenario.quant_noise_var()
    else:
        qv = np.broadcast_to(np.asarray(quant_var, dtype=float), (scenario.m,)).copy()
        if np.any(qv[~np.isnan(qv)] < 0):
            raise ValueError("quantization noise variances must be >= 0")
    censored = np.isnan(qv)
    qv = np.where(censored, 0.0, qv)

    s = qv / (2 * n * var**2)
    offsets = None
    if family == "optimal":
        w = xi / (n * var**2 * (1 + 2 * xi + s) * (1 + s))
    elif family == "weighted":
        w = 1.0 / (2 * n * var**2 * (1 + s) ** 2)
    elif family == "equal":
        w = np.ones(scenario.m)
    elif family == "linear":
        w = xi / (n * var * (1 + 2 * xi + qv / (n * var)))
    else:
        w = np.ones(scenario.m)
    if family in QUADRATIC:
        offsets = n * var / 2 - qv / (4 * var)
    w = np.where(censored, 0.0, w)
    return FusionRule(family, True, w, offsets, censored)


def make_rule(family: str, scenario: Scenario, quantized: bool = True) -> FusionRule:
    """Build a rule by family name (``optimal``, ``weighted``, ``equal``,
    ``linear``, ``equal-linear``)."""
    if quantized:
        return quantized_weights(family, scenario)
    try:
        return _UNQUANTIZED[family](scenario)
    except KeyError:
        raise ValueError(f"unknown fusion family {family!r}; expected one of {FAMILIES}") from None


def parse_rule_name(name: str) -> tuple[str, bool]:
    """``'optimal-q'`` -> ``('optimal', True)``; ``'linear'`` -> ``('linear', False)``."""
    name = name.strip()
    quantized = name.endswith("-q")
    family = name[:-2] if quantized else name
    if family not in FAMILIES:
        raise ValueError(f"unknown rule {name!r}; families are {FAMILIES}, append '-q' for quantized")
    return family, quantized


# -- fusion ------------------------------------------------------------------------


def fuse_array(rule: FusionRule, statistics) -> np.ndarray:
    """Fuse a ``(trials, M)`` array (or one ``(M,)`` vector) of statistics."""
    t = np.asarray(statistics, dtype=float)
    if t.shape[-1] != rule.m:
        raise ValueError(f"expected {rule.m} per-sensor statistics, got {t.shape[-1]}")
    keep = ~rule.censored
    t = t[..., keep]
    w = rule.weights[keep]
    if rule.is_quadratic:
        return ((t - rule.offsets[keep]) ** 2) @ w
    return t @ w


def fuse(rule: FusionRule, statistics) -> FusedStatistic:
    t = np.asarray(statistics, dtype=float)
    if t.ndim != 1:
        raise ValueError("fuse takes one vector of per-sensor statistics")
    return FusedStatistic(float(fuse_array(rule, t)), rule)
