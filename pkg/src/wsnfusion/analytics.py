"""Gaussian-approximation moments, Neyman-Pearson thresholds and analytic ROC."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from .fusion import FusionRule
from .scenario import Scenario, SensorSite, site_snr


def qfunc(x):
    """Gaussian tail probability ``P(Z > x)``."""
    out = special.ndtr(-np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def qfunc_inv(p):
    """Inverse of :func:`qfunc` on ``(0, 1)``."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise ValueError("qfunc_inv needs probabilities strictly inside (0, 1)")
    out = -special.ndtri(p)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MomentSet:
    mean_h0: float
    var_h0: float
    mean_h1: float
    var_h1: float

    def __post_init__(self):
        if self.var_h0 < 0 or self.var_h1 < 0:
            raise ValueError("variances must be >= 0")

    @property
    def psi(self) -> float:
        """Separation of the two means."""
        return self.mean_h1 - self.mean_h0

    def scaled(self, c: float) -> "MomentSet":
        return MomentSet(c * self.mean_h0, c * c * self.var_h0, c * self.mean_h1, c * c * self.var_h1)


# -- per-sensor moments (vectorized over sensors) --------------------------------------


def _t_moments(var, xi, n, quant_var=0.0):
    var = np.asarray(var, dtype=float)
    xi = np.asarray(xi, dtype=float)
    mean0 = n * var
    mean1 = n * var * (1 + xi)
    var0 = 2 * n * var**2 + quant_var
    var1 = 2 * n * var**2 * (1 + 2 * xi) + quant_var
    return mean0, var0, mean1, var1


def _u_moments(var, xi, n, quant_var, b):
    """Moments of ``(T_hat - b)^2`` under the Gaussian model of ``T_hat``."""
    var = np.asarray(var, dtype=float)
    _, vt0, mt1, vt1 = _t_moments(var, xi, n, quant_var)
    mean0 = 2 * n * var**2 + n**2 * var**2 + quant_var - 2 * b * n * var + b**2
    var0 = vt0 * (4 * n**2 * var**2 + 2 * vt0 + 4 * b**2 - 8 * n * b * var)
    mean1 = mt1**2 + vt1 - 2 * b * (n * var + n * var * xi) + b**2
    var1 = 4 * mt1**2 * vt1 + 2 * vt1**2 + 4 * b**2 * vt1 - 8 * b * mt1 * vt1
    return mean0, var0, mean1, var1


def ti_moments(site: SensorSite, n_samples: int) -> MomentSet:
    """Moments of the energy statistic under both hypotheses."""
    m = _t_moments(site.noise_var, site_snr(site, n_samples), n_samples)
    return MomentSet(*(float(v) for v in m))


def that_moments(site: SensorSite, n_samples: int, quant_var: float) -> MomentSet:
    """Moments of the quantized energy statistic (additive-noise model)."""
    if quant_var < 0:
        raise ValueError("quant_var must be >= 0")
    m = _t_moments(site.noise_var, site_snr(site, n_samples), n_samples, quant_var)
    return MomentSet(*(float(v) for v in m))


def ui_moments(site: SensorSite, n_samples: int, quant_var: float, offset: float) -> MomentSet:
    """Moments of ``U = (T_hat - offset)^2`` with ``T_hat`` Gaussian."""
    if quant_var < 0:
        raise ValueError("quant_var must be >= 0")
    m = _u_moments(site.noise_var, site_snr(site, n_samples), n_samples, quant_var, offset)
    return MomentSet(*(float(v) for v in m))


def rule_quant_var(rule: FusionRule, scenario: Scenario) -> np.ndarray:
    """Quantization noise variance seen by ``rule`` (0 for unquantized rules,
    0 placeholder for censored sensors)."""
    if not rule.quantized:
        return np.zeros(scenario.m)
    qv = scenario.quant_noise_var()
    return np.where(np.isnan(qv), 0.0, qv)


def sensor_moments(rule: FusionRule, scenario: Scenario) -> tuple[np.ndarray, ...]:
    """Per-sensor moments of the summand the rule weights (U_i or T_hat_i)."""
    if rule.m != scenario.m:
        raise ValueError("rule and scenario disagree on the number of sensors")
    qv = rule_quant_var(rule, scenario)
    var, xi, n = scenario.noise_var, scenario.snr, scenario.n_samples
    if rule.is_quadratic:
        return _u_moments(var, xi, n, qv, rule.offsets)
    return _t_moments(var, xi, n, qv)


def fusion_moments(rule: FusionRule, scenario: Scenario) -> MomentSet:
    """Moments of the fused statistic: weighted sums over independent sensors."""
    mean0, var0, mean1, var1 = sensor_moments(rule, scenario)
    keep = ~rule.censored
    w = rule.weights[keep]
    return MomentSet(
        float(w @ mean0[keep]),
        float((w**2) @ var0[keep]),
        float(w @ mean1[keep]),
        float((w**2) @ var1[keep]),
    )


# -- thresholds and detection probability ------------------------------------------


def _check_pfa(p_fa):
    p = np.asarray(p_fa, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise ValueError(f"p_fa must lie strictly inside (0, 1), got {p_fa}")
    return p


def threshold_for_pfa(moments: MomentSet, p_fa: float) -> float:
    """Threshold whose Gaussian-model false-alarm rate is ``p_fa``.

    Decide H1 when the fused statistic is ``>=`` the threshold.
    """
    _check_pfa(p_fa)
    if not moments.var_h0 > 0:
        raise ValueError("threshold needs a positive H0 variance")
    return moments.mean_h0 + qfunc_inv(p_fa) * np.sqrt(moments.var_h0)


def beta_statistic(moments: MomentSet, p_fa) -> np.ndarray | float:
    """Argument of Q in the closed-form detection probability."""
    p = _check_pfa(p_fa)
    num = qfunc_inv(p) * np.sqrt(moments.var_h0) - moments.psi
    if moments.var_h1 > 0:
        return num / np.sqrt(moments.var_h1)
    # deterministic statistic under H1
    return np.where(num > 0, np.inf, np.where(num < 0, -np.inf, np.nan))


def pd_closed_form(moments: MomentSet, p_fa):
    """Detection probability at false-alarm rate ``p_fa`` (scalar or array)."""
    p = _check_pfa(p_fa)
    if moments.var_h0 == 0 and moments.var_h1 == 0:
        # both hypotheses deterministic: randomized test if indistinguishable
        out = p if moments.psi == 0 else np.full(p.shape, 1.0 if moments.psi > 0 else 0.0)
    else:
        out = qfunc(beta_statistic(moments, p))
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


# -- ROC curves ----------------------------------------------------------------------


@dataclass
class DetectionCurve:
    p_fa: np.ndarray
    p_d: np.ndarray
    rule: str
    provenance: str = "analytic"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.p_fa = np.asarray(self.p_fa, dtype=float)
        self.p_d = np.asarray(self.p_d, dtype=float)
        if self.p_fa.shape != self.p_d.shape or self.p_fa.ndim != 1:
            raise ValueError("p_fa and p_d must be 1-d arrays of equal length")
        if np.any(np.diff(self.p_fa) <= 0):
            raise ValueError("p_fa must be strictly increasing")
        if self.provenance not in ("analytic", "empirical"):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.p_fa.tolist(), self.p_d.tolist()))


def roc_curve(rule: FusionRule, scenario: Scenario, p_fa_grid: Sequence[float]) -> DetectionCurve:
    grid = np.asarray(p_fa_grid, dtype=float)
    pd = pd_closed_form(fusion_moments(rule, scenario), grid)
    return DetectionCurve(grid, np.atleast_1d(pd), rule.name, "analytic")


CURVE_COLUMNS = ("rule", "provenance", "p_fa", "p_d")


def write_curves_csv(curves: Iterable[DetectionCurve], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVE_COLUMNS)
        for c in curves:
            for pfa, pd in c.points:
                writer.writerow([c.rule, c.provenance, repr(pfa), repr(pd)])


def read_curves_csv(path) -> list[DetectionCurve]:
    rows: dict[tuple[str, str], list[tuple[float, float]]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CURVE_COLUMNS:
            raise ValueError(f"{path}: expected columns {CURVE_COLUMNS}, got {reader.fieldnames}")
        for row in reader:
            rows.setdefault((row["rule"], row["provenance"]), []).append(
                (float(row["p_fa"]), float(row["p_d"]))
            )
    return [
        DetectionCurve([p for p, _ in pts], [d for _, d in pts], rule, prov)
        for (rule, prov), pts in rows.items()
    ]
