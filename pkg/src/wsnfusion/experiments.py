"""Experiment specs and runners that emit CSV data plus a run manifest."""

from __future__ import annotations

import csv
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import __version__
from .allocation import branch_and_bound, write_allocation_csv
from .analytics import fusion_moments, pd_closed_form, roc_curve, write_curves_csv
from .config import META_PREFIX, ConfigError, read_config, write_config
from .fusion import make_rule, parse_rule_name
from .montecarlo import TrialBatch, empirical_rates, empirical_roc, empirical_threshold, run_trials
from .scenario import SCENARIO_DEFAULTS, Hypothesis, Scenario, scenario_from_config

CSV_SCHEMA_VERSION = 1

EXPERIMENTS = ("roc", "pd-vs-n", "pd-vs-m", "pd-vs-snr", "pd-vs-n-power", "power-alloc")
SWEEP_AXES = {"n": "pd-vs-n", "m": "pd-vs-m", "snr": "pd-vs-snr", "power": "pd-vs-n-power"}

SIX_RULES = ["optimal", "optimal-q", "weighted-q", "equal-q", "linear-q", "equal-linear-q"]
ROC_GRID = [0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99]

RUN_DEFAULTS: dict[str, Any] = {
    "experiment": "roc",
    "rules": SIX_RULES,
    "p_fa": 0.1,
    "p_fa_grid": ROC_GRID,
    "sweep_values": None,
    "power_values": None,
    "trials": 10_000,
    "workers": 1,
    "budget": 20.0,
    "tolerance": 1e-4,
    "max_nodes": 100_000,
}

# per-experiment defaults, applied only to keys the config leaves unset
EXPERIMENT_DEFAULTS: dict[str, dict[str, Any]] = {
    "roc": {"m": 10, "n": 10},
    "pd-vs-n": {"m": 20, "sweep_values": [10, 20, 50, 100, 200]},
    "pd-vs-m": {"n": 10, "sweep_values": [5, 10, 15, 20, 25, 30]},
    "pd-vs-snr": {"m": 20, "n": 10, "sweep_values": [-15, -12, -10, -8.5, -7, -5, -3, 0]},
    "pd-vs-n-power": {
        "m": 10,
        "quant_half_range": 1.0,
        "sweep_values": [10, 20, 50, 100],
        "power_values": [0.2, 1.0, 5.0, 25.0],
    },
    "power-alloc": {"m": 20, "n": 10},
}

KNOWN_KEYS = set(SCENARIO_DEFAULTS) | set(RUN_DEFAULTS)


@dataclass
class ExperimentSpec:
    experiment: str
    scenario: dict[str, Any]
    rules: list[str]
    p_fa: float
    p_fa_grid: list[float]
    sweep_values: list[float] | None
    power_values: list[float] | None
    trials: int
    workers: int
    budget: float
    tolerance: float
    max_nodes: int
    seed: int = field(init=False)

    def __post_init__(self):
        self.seed = int(self.scenario["seed"])

    def to_config(self) -> dict[str, Any]:
        out = {"experiment": self.experiment}
        out.update(self.scenario)
        for key in RUN_DEFAULTS:
            if key != "experiment":
                out[key] = getattr(self, key)
        return out

    def build_scenario(self, **overrides) -> Scenario:
        return scenario_from_config({**self.scenario, **overrides})


def _require(cond: bool, key: str, message: str):
    if not cond:
        raise ConfigError(key, message)


def _sorted_grid(values, key: str) -> list[float]:
    _require(isinstance(values, list) and len(values) > 0, key, "must be a nonempty list")
    try:
        grid = [float(v) for v in values]
    except (TypeError, ValueError):
        raise ConfigError(key, f"must hold numbers, got {values!r}") from None
    _require(all(b > a for a, b in zip(grid, grid[1:])), key, "must be strictly increasing")
    return grid


def validate_config(source: str | Path | Mapping[str, Any] | None = None, **overrides) -> ExperimentSpec:
    """Resolve a config file (or mapping) plus overrides into a full spec.

    Unknown keys and out-of-range values raise :class:`ConfigError` naming
    the key.
    """
    if source is None:
        raw: dict[str, Any] = {}
    elif isinstance(source, Mapping):
        raw = dict(source)
    else:
        raw = read_config(source)
    raw = {k: v for k, v in raw.items() if not k.startswith(META_PREFIX)}
    raw.update({k: v for k, v in overrides.items() if v is not None})
    for key in raw:
        if key not in KNOWN_KEYS:
            raise ConfigError(key, "unknown configuration key")

    experiment = raw.get("experiment", RUN_DEFAULTS["experiment"])
    _require(experiment in EXPERIMENTS, "experiment", f"must be one of {EXPERIMENTS}, got {experiment!r}")
    cfg = {**SCENARIO_DEFAULTS, **RUN_DEFAULTS, **EXPERIMENT_DEFAULTS[experiment], **raw}

    for key in ("m", "n", "trials", "workers", "max_nodes", "seed"):
        val = cfg[key]
        _require(isinstance(val, int) and not isinstance(val, bool), key, f"must be an integer, got {val!r}")
    for key in ("m", "n", "trials", "workers", "max_nodes"):
        _require(cfg[key] >= 1, key, "must be >= 1")
    p_fa = cfg["p_fa"]
    _require(isinstance(p_fa, (int, float)) and 0 < p_fa < 1, "p_fa", f"must lie in (0, 1), got {p_fa!r}")
    grid = _sorted_grid(cfg["p_fa_grid"], "p_fa_grid")
    _require(0 < grid[0] and grid[-1] < 1, "p_fa_grid", "values must lie in (0, 1)")
    for key in ("amplitude", "quant_half_range", "comm_noise_var", "budget", "tolerance"):
        _require(isinstance(cfg[key], (int, float)), key, f"must be a number, got {cfg[key]!r}")
    for key in ("quant_half_range", "comm_noise_var", "budget", "tolerance"):
        _require(cfg[key] > 0, key, "must be > 0")
    nvr = cfg["noise_var_range"]
    _require(
        isinstance(nvr, list) and len(nvr) == 2 and 0 < nvr[0] <= nvr[1],
        "noise_var_range",
        f"must be [low, high] with 0 < low <= high, got {nvr!r}",
    )
    _require(cfg["quant_mode"] in ("additive", "explicit"), "quant_mode", "must be 'additive' or 'explicit'")
    rules = cfg["rules"]
    _require(isinstance(rules, list) and len(rules) > 0, "rules", "must be a nonempty list")
    for name in rules:
        try:
            parse_rule_name(str(name))
        except ValueError as exc:
            raise ConfigError("rules", str(exc)) from None

    sweep = cfg["sweep_values"]
    if experiment in ("pd-vs-n", "pd-vs-m", "pd-vs-snr", "pd-vs-n-power"):
        sweep = _sorted_grid(sweep, "sweep_values")
        if experiment != "pd-vs-snr":
            _require(all(v >= 1 and v == int(v) for v in sweep), "sweep_values", "must be positive integers")
            sweep = [int(v) for v in sweep]
    powers = cfg["power_values"]
    if experiment == "pd-vs-n-power":
        powers = _sorted_grid(powers, "power_values")
        _require(powers[0] >= 0, "power_values", "powers must be >= 0")

    scenario = {k: cfg[k] for k in SCENARIO_DEFAULTS}
    spec = ExperimentSpec(
        experiment=experiment,
        scenario=scenario,
        rules=[str(r) for r in rules],
        p_fa=float(p_fa),
        p_fa_grid=grid,
        sweep_values=sweep,
        power_values=powers,
        trials=int(cfg["trials"]),
        workers=int(cfg["workers"]),
        budget=float(cfg["budget"]),
        tolerance=float(cfg["tolerance"]),
        max_nodes=int(cfg["max_nodes"]),
    )
    try:
        spec.build_scenario()
    except ValueError as exc:
        raise ConfigError("scenario", str(exc)) from None
    return spec


# -- runners ---------------------------------------------------------------------------


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _num(x) -> str:
    return repr(float(x))


def _run_roc(spec: ExperimentSpec, out: Path) -> dict[str, Any]:
    scenario = spec.build_scenario()
    curves, summary = [], {}
    for name in spec.rules:
        family, quantized = parse_rule_name(name)
        rule = make_rule(family, scenario, quantized)
        analytic = roc_curve(rule, scenario, spec.p_fa_grid)
        empirical = empirical_roc(scenario, rule, spec.trials, spec.p_fa_grid, spec.seed, spec.workers)
        curves += [analytic, empirical]
        summary[f"max_abs_diff.{rule.name}"] = float(np.max(np.abs(analytic.p_d - empirical.p_d)))
    write_curves_csv(curves, out / "roc.csv")
    return {"outputs": ["roc.csv"], "summary": summary, "curves": curves}


SWEEP_COLUMNS = (
    "rule", "n", "m", "avg_snr_db", "tx_power", "p_fa",
    "pd_analytic", "pd_empirical", "pd_empirical_ci_low", "pd_empirical_ci_high",
)


def _sweep_points(spec: ExperimentSpec):
    if spec.experiment == "pd-vs-n":
        for n in spec.sweep_values:
            yield spec.build_scenario(n=n)
    elif spec.experiment == "pd-vs-m":
        for m in spec.sweep_values:
            yield spec.build_scenario(m=m)
    elif spec.experiment == "pd-vs-snr":
        for db in spec.sweep_values:
            yield spec.build_scenario(target_avg_snr_db=db)
    else:
        for p in spec.power_values:
            for n in spec.sweep_values:
                yield spec.build_scenario(n=n, tx_power=p, bits=None)


def _run_sweep(spec: ExperimentSpec, out: Path) -> dict[str, Any]:
    rows = []
    for scenario in _sweep_points(spec):
        tx = float(np.mean(scenario.tx_power))
        for name in spec.rules:
            family, quantized = parse_rule_name(name)
            rule = make_rule(family, scenario, quantized)
            pd_an = pd_closed_form(fusion_moments(rule, scenario), spec.p_fa)
            h0 = run_trials(TrialBatch(scenario, rule, spec.trials, Hypothesis.H0, spec.seed), spec.workers)
            h1 = run_trials(TrialBatch(scenario, rule, spec.trials, Hypothesis.H1, spec.seed), spec.workers)
            rates = empirical_rates(h0, h1, empirical_threshold(h0, spec.p_fa))
            rows.append(
                [rule.name, scenario.n_samples, scenario.m, _num(scenario.avg_snr_db), _num(tx),
                 _num(spec.p_fa), _num(pd_an), _num(rates.p_d), _num(rates.p_d_ci[0]), _num(rates.p_d_ci[1])]
            )
    name = f"{spec.experiment}.csv"
    _write_csv(out / name, SWEEP_COLUMNS, rows)
    return {"outputs": [name], "summary": {"points": len(rows)}, "rows": rows}


def _run_alloc(spec: ExperimentSpec, out: Path) -> dict[str, Any]:
    scenario = spec.build_scenario()
    alloc = branch_and_bound(scenario, spec.budget, spec.p_fa, spec.tolerance, spec.max_nodes)
    write_allocation_csv(alloc, scenario, out / "allocation.csv")
    return {"outputs": ["allocation.csv"], "summary": alloc.summary(), "allocation": alloc}


_RUNNERS = {
    "roc": _run_roc,
    "pd-vs-n": _run_sweep,
    "pd-vs-m": _run_sweep,
    "pd-vs-snr": _run_sweep,
    "pd-vs-n-power": _run_sweep,
    "power-alloc": _run_alloc,
}


def _manifest(spec: ExperimentSpec, status: str, extra: Mapping[str, Any]) -> dict[str, Any]:
    meta = {
        f"{META_PREFIX}status": status,
        f"{META_PREFIX}toolkit_version": __version__,
        f"{META_PREFIX}csv_schema_version": CSV_SCHEMA_VERSION,
        f"{META_PREFIX}python": platform.python_version(),
        f"{META_PREFIX}numpy": np.__version__,
    }
    meta.update({f"{META_PREFIX}{k}": v for k, v in extra.items()})
    return {**meta, **spec.to_config()}


def run_experiment(spec: ExperimentSpec, out_dir) -> dict[str, Any]:
    """Run one experiment, writing CSV outputs and ``manifest.txt`` to ``out_dir``.

    The manifest is written first with status ``incomplete`` and rewritten
    as ``complete`` at the end; it doubles as a config file that reproduces
    the run.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.txt"
    write_config(_manifest(spec, "incomplete", {}), manifest_path, "wsnfusion run manifest")
    start = time.perf_counter()
    try:
        result = _RUNNERS[spec.experiment](spec, out)
    except Exception as exc:
        write_config(
            _manifest(spec, "incomplete", {"error": f"{type(exc).__name__}: {exc}"}),
            manifest_path,
            "wsnfusion run manifest",
        )
        raise
    extra = {
        "wall_time_s": round(time.perf_counter() - start, 3),
        "outputs": result["outputs"],
        **{f"summary.{k}": v for k, v in result["summary"].items()},
    }
    write_config(_manifest(spec, "complete", extra), manifest_path, "wsnfusion run manifest")
    result["manifest"] = manifest_path
    return result
