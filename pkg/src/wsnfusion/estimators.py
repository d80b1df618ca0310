"""scikit-learn style wrappers around the fusion detector and power allocator."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_labels, check_probability, check_statistics
from .allocation import branch_and_bound
from .analytics import fusion_moments, pd_closed_form, threshold_for_pfa
from .fusion import FAMILIES, fuse_array, make_rule
from .montecarlo import empirical_threshold
from .scenario import Scenario


class FusionDetector(ClassifierMixin, TransformerMixin, BaseEstimator):
    """Fusion-center detector over per-sensor energy statistics.

    Parameters
    ----------
    scenario : Scenario
        Sensor configuration the weights are derived from.
    rule : str
        Weight family, one of ``optimal``, ``weighted``, ``equal``,
        ``linear`` or ``equal-linear``.
    quantized : bool
        Use the quantization-aware weights and offsets.
    p_fa : float
        Target false-alarm probability.
    threshold_mode : {"analytic", "empirical"}
        ``analytic`` sets the threshold from the Gaussian moment model and
        ignores the data; ``empirical`` takes the H0 quantile of the fused
        training statistics (rows with ``y == 0``, or all rows if ``y`` is
        None).

    Attributes
    ----------
    rule_ : FusionRule
    moments_ : MomentSet
    threshold_ : float
    pd_analytic_ : float
        Closed-form detection probability at ``p_fa``.
    """

    def __init__(self, scenario: Scenario | None = None, rule: str = "optimal", quantized: bool = True,
                 p_fa: float = 0.1, threshold_mode: str = "analytic"):
        self.scenario = scenario
        self.rule = rule
        self.quantized = quantized
        self.p_fa = p_fa
        self.threshold_mode = threshold_mode

    def fit(self, X=None, y=None):
        if not isinstance(self.scenario, Scenario):
            raise TypeError("scenario must be a Scenario")
        if self.rule not in FAMILIES:
            raise ValueError(f"rule must be one of {FAMILIES}, got {self.rule!r}")
        if self.threshold_mode not in ("analytic", "empirical"):
            raise ValueError(f"unknown threshold_mode {self.threshold_mode!r}")
        p_fa = check_probability(self.p_fa)
        self.rule_ = make_rule(self.rule, self.scenario, bool(self.quantized))
        self.moments_ = fusion_moments(self.rule_, self.scenario)
        self.pd_analytic_ = float(pd_closed_form(self.moments_, p_fa))
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = self.scenario.m
        if self.threshold_mode == "analytic":
            self.threshold_ = float(threshold_for_pfa(self.moments_, p_fa))
            return self
        if X is None:
            raise ValueError("threshold_mode='empirical' needs training statistics")
        X = check_statistics(X, self.scenario.m, self)
        fused = fuse_array(self.rule_, X)
        if y is not None:
            fused = fused[check_labels(y, X.shape[0]) == 0]
            if fused.size == 0:
                raise ValueError("no H0 rows (y == 0) to calibrate on")
        self.threshold_ = empirical_threshold(fused, p_fa)
        return self

    def transform(self, X):
        """Fused statistic of each row, shape ``(n, 1)``."""
        check_is_fitted(self, "rule_")
        return fuse_array(self.rule_, check_statistics(X, self.n_features_in_, self))[:, None]

    def decision_function(self, X):
        return self.transform(X)[:, 0] - self.threshold_

    def predict(self, X):
        """1 (H1) where the fused statistic reaches the threshold, else 0."""
        return (self.decision_function(X) >= 0).astype(int)


class PowerAllocator(BaseEstimator):
    """Branch-and-bound transmit-power allocation.

    ``fit`` takes a :class:`Scenario` in place of a data matrix.

    Attributes
    ----------
    allocation_ : PowerAllocation
    powers_ : ndarray
    bits_ : ndarray
    scenario_ : Scenario
        The input scenario with the allocated powers applied.
    """

    def __init__(self, budget: float = 20.0, p_fa: float = 0.1, tol: float = 1e-4, max_nodes: int = 100_000):
        self.budget = budget
        self.p_fa = p_fa
        self.tol = tol
        self.max_nodes = max_nodes

    def fit(self, scenario: Scenario, y=None):
        if not isinstance(scenario, Scenario):
            raise TypeError("fit expects a Scenario")
        if not self.budget > 0:
            raise ValueError(f"budget must be positive, got {self.budget}")
        p_fa = check_probability(self.p_fa)
        self.allocation_ = branch_and_bound(scenario, float(self.budget), p_fa, float(self.tol), int(self.max_nodes))
        self.powers_ = self.allocation_.powers
        self.bits_ = self.allocation_.bits
        self.scenario_ = scenario.with_powers(self.powers_)
        return self

    def predict(self, scenario: Scenario | None = None):
        """Allocated powers (the fitted scenario is the only valid input)."""
        check_is_fitted(self, "allocation_")
        return np.array(self.powers_, copy=True)

    def score(self, scenario: Scenario | None = None, y=None) -> float:
        """Closed-form detection probability of the allocation."""
        check_is_fitted(self, "allocation_")
        return float(self.allocation_.objective)
