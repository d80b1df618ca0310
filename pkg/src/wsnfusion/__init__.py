"""Soft-decision fusion toolkit for energy-detecting sensor networks."""

__version__ = "0.1.0"

from .allocation import PowerAllocation, beta_objective, branch_and_bound, exhaustive_grid_oracle
from .analytics import (
    DetectionCurve,
    MomentSet,
    fusion_moments,
    pd_closed_form,
    qfunc,
    qfunc_inv,
    roc_curve,
    threshold_for_pfa,
)
from .config import ConfigError, read_config, write_config
from .estimators import FusionDetector, PowerAllocator
from .experiments import ExperimentSpec, run_experiment, validate_config
from .fusion import FusionRule, fuse, fuse_array, make_rule, quantized_weights
from .montecarlo import TrialBatch, empirical_rates, empirical_roc, run_trials, simulate_statistics
from .quantization import CensoredSensorError, QuantizerSpec, bits_for_power, quant_noise_variance, quantize
from .scenario import Hypothesis, Scenario, SensorSite, generate_scenario, sample_energies

__all__ = [
    "CensoredSensorError",
    "ConfigError",
    "DetectionCurve",
    "ExperimentSpec",
    "FusionDetector",
    "FusionRule",
    "Hypothesis",
    "MomentSet",
    "PowerAllocation",
    "PowerAllocator",
    "QuantizerSpec",
    "Scenario",
    "SensorSite",
    "TrialBatch",
    "beta_objective",
    "bits_for_power",
    "branch_and_bound",
    "empirical_rates",
    "empirical_roc",
    "exhaustive_grid_oracle",
    "fuse",
    "fuse_array",
    "fusion_moments",
    "generate_scenario",
    "make_rule",
    "pd_closed_form",
    "qfunc",
    "qfunc_inv",
    "quant_noise_variance",
    "quantize",
    "quantized_weights",
    "read_config",
    "roc_curve",
    "run_experiment",
    "run_trials",
    "sample_energies",
    "simulate_statistics",
    "threshold_for_pfa",
    "validate_config",
    "write_config",
]
