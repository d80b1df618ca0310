"""Transmit-power allocation maximizing the closed-form detection probability.

The objective only sees powers through the integer bit budgets they buy, so
the search runs over boxes of per-sensor bit intervals. A box with bit
intervals ``[lo_i, hi_i]`` corresponds to the power box
``[p_min(lo_i), p_min(hi_i + 1))``.
"""

from __future__ import annotations

import csv
import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .analytics import fusion_moments, qfunc, qfunc_inv, _u_moments
from .fusion import quantized_weights
from .quantization import bits_for_power_array, min_power_for_bits
from .scenario import Scenario

MAX_BITS = 48


def beta_objective(powers, scenario: Scenario, p_fa: float) -> float:
    """Argument of Q in ``P_d = Q(beta)`` for the quantized optimal rule.

    Returns ``inf`` when every sensor is censored (no information, the
    detector falls back to ``P_d = p_fa``).
    """
    powers = np.asarray(powers, dtype=float)
    if np.any(powers < 0):
        raise ValueError("powers must be >= 0")
    sc = scenario.with_powers(powers)
    rule = quantized_weights("optimal", sc)
    if np.all(rule.censored):
        return math.inf
    mo = fusion_moments(rule, sc)
    return (qfunc_inv(p_fa) * math.sqrt(mo.var_h0) - mo.psi) / math.sqrt(mo.var_h1)


def detection_probability(beta: float, p_fa: float) -> float:
    return p_fa if math.isinf(beta) and beta > 0 else qfunc(beta)


class BitTable:
    """Per-sensor weighted moment contributions for every bit level.

    Row ``i``, column ``L`` holds ``a_i^q`` times the moments of ``U_i``
    (and ``a_i^q`` squared for the variances) at ``L`` bits; column 0 is the
    censored sensor and contributes nothing. Levels above ``max_bits[i]``
    (unaffordable within the budget) are stored as zeros, so bit vectors
    passed to the evaluation methods must satisfy ``bits <= max_bits``.
    """

    def __init__(self, scenario: Scenario, p_fa: float, budget: float):
        self.scenario = scenario
        self.p_fa = p_fa
        self.q = qfunc_inv(p_fa)
        self.budget = float(budget)
        m = scenario.m
        gains, zeta = scenario.channel_gain, scenario.comm_noise_var
        top = [
            int(bits_for_power_array(budget, g, z)) if g > 0 else 0 for g, z in zip(gains, zeta)
        ]
        self.max_bits = np.minimum(np.array(top, dtype=int), MAX_BITS)
        width = int(self.max_bits.max()) + 1
        self.cost = np.full((m, width), math.inf)
        self.cost[:, 0] = 0.0
        for i in range(m):
            for level in range(1, self.max_bits[i] + 1):
                self.cost[i, level] = min_power_for_bits(level, gains[i], zeta[i])

        var, xi, n = scenario.noise_var, scenario.snr, scenario.n_samples
        self.mean0 = np.zeros((m, width))
        self.mean1 = np.zeros((m, width))
        self.var0 = np.zeros((m, width))
        self.var1 = np.zeros((m, width))
        for level in range(1, width):
            qv = np.full(m, scenario.quant_half_range**2 / (3.0 * 4.0**level))
            rule = quantized_weights("optimal", scenario, qv)
            e0, v0, e1, v1 = _u_moments(var, xi, n, qv, rule.offsets)
            a = rule.weights
            ok = self.max_bits >= level
            self.mean0[ok, level] = (a * e0)[ok]
            self.mean1[ok, level] = (a * e1)[ok]
            self.var0[ok, level] = (a**2 * v0)[ok]
            self.var1[ok, level] = (a**2 * v1)[ok]
        self.psi = self.mean1 - self.mean0
        with np.errstate(divide="ignore", invalid="ignore"):
            self.deflection = np.where(self.var1 > 0, self.psi**2 / self.var1, 0.0)
        self._rows = np.arange(m)
        self.range_cache: dict = {}

    def totals(self, bits):
        bits = np.asarray(bits)
        r = self._rows
        return (
            self.var0[r, bits].sum(axis=-1),
            self.psi[r, bits].sum(axis=-1),
            self.var1[r, bits].sum(axis=-1),
        )

    def beta(self, bits) -> float:
        v0, psi, v1 = self.totals(bits)
        if v1 <= 0:
            return math.inf
        return float((self.q * math.sqrt(v0) - psi) / math.sqrt(v1))

    def beta_many(self, bits: np.ndarray) -> np.ndarray:
        """``beta`` for each row of a ``(K, M)`` bit matrix."""
        r = self._rows
        v0 = self.var0[r, bits].sum(axis=1)
        psi = self.psi[r, bits].sum(axis=1)
        v1 = self.var1[r, bits].sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (self.q * np.sqrt(v0) - psi) / np.sqrt(v1)
        return np.where(v1 > 0, out, np.inf)

    def power(self, bits) -> float:
        return float(self.cost[self._rows, np.asarray(bits)].sum())

    def feasible(self, bits) -> bool:
        bits = np.asarray(bits)
        return bool(np.all(bits <= self.max_bits)) and self.power(bits) <= self.budget


@dataclass
class BnBNode:
    """Box of bit intervals with bounds on the objective inside it."""

    lo: np.ndarray
    hi: np.ndarray
    lower_bound: float
    upper_bound: float
    incumbent: np.ndarray

    def box(self, table: BitTable) -> np.ndarray:
        """Per-sensor power intervals ``[p_min(lo), p_min(hi + 1))``, clipped to the budget."""
        r = np.arange(len(self.lo))
        upper = np.full(len(self.lo), table.budget)
        nxt = self.hi + 1
        inside = nxt < table.cost.shape[1]
        upper[inside] = np.minimum(upper[inside], table.cost[r[inside], nxt[inside]])
        return np.stack([table.cost[r, self.lo], upper], axis=1)


@dataclass
class PowerAllocation:
    powers: np.ndarray
    budget: float
    bits: np.ndarray
    objective: float
    beta: float
    gap: float = 0.0
    nodes: int = 0
    converged: bool = True
    method: str = "branch-and-bound"
    meta: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "method": self.method,
            "budget": self.budget,
            "total_power": float(np.sum(self.powers)),
            "beta": self.beta,
            "p_d": self.objective,
            "gap": self.gap,
            "nodes": self.nodes,
            "converged": self.converged,
        }


# -- bounding --------------------------------------------------------------------------


def _hull_segments(cost: np.ndarray, values: np.ndarray, lo: int, hi: int) -> list:
    """Upper concave hull of one sensor's (extra cost, extra value) points
    for levels ``lo..hi``, as ``(slope, width, gain)`` segments with
    positive slope."""
    base_c, base_v = cost[lo], values[lo]
    pts = [(cost[k] - base_c, values[k] - base_v) for k in range(lo + 1, hi + 1)]
    x0 = y0 = 0.0
    segments = []
    while pts:
        slopes = [(y - y0) / (x - x0) if x > x0 else math.inf for x, y in pts]
        j = int(np.argmax(slopes))
        if slopes[j] <= 0:
            break
        x, y = pts[j]
        segments.append((slopes[j], x - x0, y - y0))
        x0, y0 = x, y
        pts = pts[j + 1 :]
    return segments


def _knapsack(base: float, segments: list, spare: float) -> float:
    """Fractional multiple-choice knapsack: greedy over hull segments."""
    total = base
    for slope, width, gain in sorted(segments, key=lambda s: -s[0]):
        if spare <= 0:
            break
        if width <= spare:
            total += gain
            spare -= width
        else:
            total += slope * spare
            spare = 0.0
    return total


class _SensorRange:
    """Cached per-sensor summaries of the bit levels ``lo..hi``."""

    __slots__ = ("v0_min", "v0_max", "v1_min", "v1_max", "ratio_min", "ratio_max", "psi_hull", "defl_hull")

    def __init__(self, table: BitTable, i: int, lo: int, hi: int):
        seg0 = table.var0[i, lo : hi + 1]
        seg1 = table.var1[i, lo : hi + 1]
        self.v0_min, self.v0_max = float(seg0.min()), float(seg0.max())
        self.v1_min, self.v1_max = float(seg1.min()), float(seg1.max())
        active = seg1 > 0
        if np.any(active):
            r = seg0[active] / seg1[active]
            self.ratio_min, self.ratio_max = float(r.min()), float(r.max())
        else:
            self.ratio_min, self.ratio_max = math.inf, 0.0
        self.psi_hull = _hull_segments(table.cost[i], table.psi[i], lo, hi)
        self.defl_hull = _hull_segments(table.cost[i], table.deflection[i], lo, hi)


def _sensor_range(table: BitTable, i: int, lo: int, hi: int) -> _SensorRange:
    key = (i, lo, hi)
    hit = table.range_cache.get(key)
    if hit is None:
        hit = table.range_cache[key] = _SensorRange(table, i, lo, hi)
    return hit


def _ratio_bound(num: float, den: float, optional: list, lower: bool) -> float:
    """Bound on ``(num + sum x_j) / (den + sum y_j)`` where each optional
    sensor adds ``y_j`` in ``[0, y_max_j]`` and ``x_j >= rho_j y_j`` (or
    ``<=`` for the upper bound). Greedy in ``rho`` order is exact for the
    relaxed problem."""
    cur = num / den if den > 0 else None
    for rho, y_max in sorted(optional, reverse=not lower):
        if cur is not None and (rho >= cur if lower else rho <= cur):
            break
        num += rho * y_max
        den += y_max
        cur = num / den
    if cur is None:
        return math.inf if lower else 0.0
    return cur


def _lower_bound(table: BitTable, lo: np.ndarray, hi: np.ndarray) -> float:
    """Valid lower bound on ``beta`` over the feasible bit vectors of a box.

    Two bounds, the larger is returned:

    * interval bound: numerator from the smallest ``q sqrt(V0)`` and the
      knapsack bound on the separation, denominator from interval sums;
    * deflection bound: by Cauchy-Schwarz ``Psi / sqrt(V1) <= sqrt(sum_i
      psi_i^2 / v1_i)``, whose right side is separable and knapsack-bounded,
      while ``V0 / V1`` is bracketed by mediant inequalities.

    Knapsack bounds use the LP relaxation of the budget constraint.
    """
    r = np.arange(len(lo))
    spare = table.budget - table.power(lo)
    ranges = [_sensor_range(table, i, int(lo[i]), int(hi[i])) for i in r]
    v0_lo = sum(s.v0_min for s in ranges)
    v0_hi = sum(s.v0_max for s in ranges)
    v1_lo = sum(s.v1_min for s in ranges)
    v1_hi = sum(s.v1_max for s in ranges)
    if v1_hi <= 0:
        return math.inf  # every sensor censored throughout the box

    psi_ub = _knapsack(float(table.psi[r, lo].sum()), [g for s in ranges for g in s.psi_hull], spare)
    num = table.q * math.sqrt(v0_lo if table.q >= 0 else v0_hi) - psi_ub
    if num >= 0:
        interval = num / math.sqrt(v1_hi)
    else:
        interval = num / math.sqrt(v1_lo) if v1_lo > 0 else -math.inf

    defl_ub = _knapsack(
        float(table.deflection[r, lo].sum()), [g for s in ranges for g in s.defl_hull], spare
    )
    forced = lo > 0
    if table.q >= 0:
        ratio = _ratio_bound(
            sum(s.v0_min for s, f in zip(ranges, forced) if f),
            sum(s.v1_max for s, f in zip(ranges, forced) if f),
            [(s.ratio_min, s.v1_max) for s, f in zip(ranges, forced) if not f and s.v1_max > 0],
            lower=True,
        )
    else:
        ratio = _ratio_bound(
            sum(s.v0_max for s, f in zip(ranges, forced) if f),
            sum(s.v1_min for s, f in zip(ranges, forced) if f),
            [(s.ratio_max, s.v1_max) for s, f in zip(ranges, forced) if not f and s.v1_max > 0],
            lower=False,
        )
    if math.isinf(ratio) or (table.q < 0 and ratio == 0.0 and not np.any(forced)):
        return interval
    deflection = table.q * math.sqrt(ratio) - math.sqrt(max(defl_ub, 0.0))
    return max(interval, deflection)


def _cannot_beat(table: BitTable, lo: np.ndarray, hi: np.ndarray, target: float) -> bool:
    """True when no feasible bit vector in the box has ``beta < target``.

    For ``target = -c < 0`` and ``q >= 0``, ``beta < target`` needs
    ``Psi > q sqrt(V0) + c sqrt(V1)``. Squaring the right side and using
    ``sqrt(V0 V1) = V1 sqrt(V0 / V1)`` gives ``Psi > sqrt(W)`` with ``W``
    separable (the cross term is bounded through a chord of ``sqrt`` over
    the attainable ``V0 / V1`` range), and Cauchy-Schwarz turns that into ``sum psi_i^2 / w_i > 1``,
    which is knapsack-bounded.
    """
    if target >= 0 or table.q < 0:
        return False
    c = -target
    r = np.arange(len(lo))
    ranges = [_sensor_range(table, i, int(lo[i]), int(hi[i])) for i in r]
    forced = lo > 0
    rho_lo = _ratio_bound(
        sum(s.v0_min for s, f in zip(ranges, forced) if f),
        sum(s.v1_max for s, f in zip(ranges, forced) if f),
        [(s.ratio_min, s.v1_max) for s, f in zip(ranges, forced) if not f and s.v1_max > 0],
        lower=True,
    )
    if math.isinf(rho_lo):
        return True
    rho_hi = max(s.ratio_max for s in ranges)
    # sqrt(rho) >= chord over [rho_lo, rho_hi], so sqrt(V0 V1) >= a V1 + b V0
    if rho_hi > rho_lo:
        b = (math.sqrt(rho_hi) - math.sqrt(rho_lo)) / (rho_hi - rho_lo)
    else:
        b = 0.0
    a = math.sqrt(rho_lo) - b * rho_lo
    w = (table.q**2 + 2 * table.q * c * b) * table.var0 + (c * c + 2 * table.q * c * a) * table.var1
    with np.errstate(divide="ignore", invalid="ignore"):
        score = np.where(w > 0, np.maximum(table.psi, 0.0) ** 2 / w, 0.0)
    segments = [g for i in r for g in _hull_segments(table.cost[i], score[i], int(lo[i]), int(hi[i]))]
    bound = _knapsack(float(score[r, lo].sum()), segments, table.budget - table.power(lo))
    return bound <= 1.0


def _tighten(table: BitTable, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Cap each upper bit level by what the remaining budget can buy."""
    r = np.arange(len(lo))
    base = table.cost[r, lo]
    spare = table.budget - base.sum()
    hi = hi.copy()
    for i in r:
        allowed = base[i] + spare
        while hi[i] > lo[i] and table.cost[i, hi[i]] > allowed:
            hi[i] -= 1
    return hi


# -- local search ----------------------------------------------------------------------


def _key(table: BitTable, bits: np.ndarray):
    """Tie-break: least total power, then lexicographically smallest powers."""
    powers = table.cost[np.arange(len(bits)), bits]
    return (round(float(powers.sum()), 12), tuple(np.round(powers, 12)))


def _better(table, beta_a, bits_a, beta_b, bits_b, tol=1e-12) -> bool:
    if beta_a < beta_b - tol:
        return True
    if beta_a > beta_b + tol:
        return False
    return _key(table, bits_a) < _key(table, bits_b)


def _greedy_fill(table: BitTable, bits: np.ndarray, hi: np.ndarray | None = None) -> np.ndarray:
    """Raise bit levels one at a time while the objective improves and the
    budget allows, preferring the best improvement per unit power."""
    bits = bits.copy()
    hi = table.max_bits if hi is None else hi
    current = table.beta(bits)
    while True:
        spare = table.budget - table.power(bits)
        cand = np.flatnonzero(bits < hi)
        if cand.size == 0:
            return bits
        extra = table.cost[cand, bits[cand] + 1] - table.cost[cand, bits[cand]]
        cand, extra = cand[extra <= spare], extra[extra <= spare]
        if cand.size == 0:
            return bits
        trial = np.repeat(bits[None, :], cand.size, axis=0)
        trial[np.arange(cand.size), cand] += 1
        betas = table.beta_many(trial)
        gain = current - betas
        if not np.any(gain > 1e-15):
            return bits
        score = np.where(gain > 1e-15, gain / np.maximum(extra, 1e-300), -np.inf)
        j = int(np.argmax(score))
        bits, current = trial[j], betas[j]


def _max_affordable(table: BitTable, i: int, spare: float, start: int) -> int:
    level = start
    while level < table.max_bits[i] and table.cost[i, level + 1] - table.cost[i, start] <= spare:
        level += 1
    return level


def local_search(table: BitTable, bits: np.ndarray) -> np.ndarray:
    """Coordinate descent over bit vectors: move one bit level of power from
    one sensor to another, or fill spare budget, until nothing improves."""
    bits = _greedy_fill(table, np.asarray(bits, dtype=int))
    best = table.beta(bits)
    m = len(bits)
    improved = True
    while improved:
        improved = False
        for i, j in itertools.permutations(range(m), 2):
            if bits[i] == 0:
                continue
            trial = bits.copy()
            trial[i] -= 1
            spare = table.budget - table.power(trial)
            trial[j] = _max_affordable(table, j, spare, trial[j])
            if trial[j] == bits[j]:
                continue
            trial = _greedy_fill(table, trial)
            b = table.beta(trial)
            if _better(table, b, trial, best, bits):
                bits, best, improved = trial, b, True
    return bits


def _starts(table: BitTable, scenario: Scenario) -> list[np.ndarray]:
    m, budget = scenario.m, table.budget
    quality = scenario.channel_gain**2 / scenario.comm_noise_var
    starts = [np.zeros(m, dtype=int)]
    splits = [np.full(m, budget / m)]
    if quality.sum() > 0:
        splits.append(budget * quality / quality.sum())
        solo = np.zeros(m)
        solo[int(np.argmax(quality))] = budget
        splits.append(solo)
    for p in splits:
        starts.append(bits_for_power_array(p, scenario.channel_gain, scenario.comm_noise_var))
    return [np.minimum(s, table.max_bits) for s in starts]


# -- branch and bound ------------------------------------------------------------------


def _spend_leftover(table: BitTable, scenario: Scenario, bits: np.ndarray) -> np.ndarray:
    """Minimal powers for ``bits`` plus the leftover budget, handed to the best
    channels first without buying any extra bit."""
    r = np.arange(len(bits))
    powers = table.cost[r, bits].copy()
    leftover = table.budget - powers.sum()
    quality = scenario.channel_gain**2 / scenario.comm_noise_var
    for i in sorted(r, key=lambda k: (-quality[k], k)):
        if leftover <= 0 or quality[i] == 0:
            continue
        nxt = bits[i] + 1
        ceiling = min_power_for_bits(nxt, scenario.channel_gain[i], scenario.comm_noise_var[i])
        ceiling = math.nextafter(ceiling, 0.0)
        give = min(leftover, ceiling - powers[i])
        if give > 0:
            powers[i] += give
            leftover -= give
    return powers


def _finish(table, scenario, bits, nodes, gap, converged, method) -> PowerAllocation:
    bits = np.asarray(bits, dtype=int)
    powers = _spend_leftover(table, scenario, bits)
    got = bits_for_power_array(powers, scenario.channel_gain, scenario.comm_noise_var)
    assert np.array_equal(got, bits), "power/bit bookkeeping out of sync"
    beta = table.beta(bits)
    return PowerAllocation(
        powers=powers,
        budget=table.budget,
        bits=bits,
        objective=detection_probability(beta, table.p_fa),
        beta=beta,
        gap=gap,
        nodes=nodes,
        converged=converged,
        method=method,
    )


def branch_and_bound(
    scenario: Scenario,
    budget: float,
    p_fa: float = 0.1,
    tol: float = 1e-4,
    max_nodes: int = 100_000,
    check_bounds: bool = False,
    check_samples: int = 8,
) -> PowerAllocation:
    """Globally minimize ``beta`` over ``{p >= 0, sum(p) <= budget}``.

    Nodes are explored best-bound first; a node is pruned when its lower
    bound cannot beat the incumbent by more than ``tol``. On hitting
    ``max_nodes`` the incumbent is returned with ``converged=False`` and the
    remaining optimality gap.

    With ``check_bounds`` every node samples feasible bit vectors from its
    box and asserts ``lower_bound <= beta(sample)`` and
    ``lower_bound <= upper_bound``.
    """
    if not budget > 0:
        raise ValueError("budget must be > 0")
    if not tol > 0:
        raise ValueError("tol must be > 0")
    table = BitTable(scenario, p_fa, budget)
    m = scenario.m

    best_bits, best = None, math.inf
    for start in _starts(table, scenario):
        cand = local_search(table, start)
        b = table.beta(cand)
        if best_bits is None or _better(table, b, cand, best, best_bits):
            best_bits, best = cand, b

    check_rng = np.random.default_rng(0)
    counter = itertools.count()
    lo0 = np.zeros(m, dtype=int)
    hi0 = _tighten(table, lo0, table.max_bits.copy())
    heap = [(_lower_bound(table, lo0, hi0), next(counter), lo0, hi0)]
    nodes = 0
    while heap:
        lb, _, lo, hi = heapq.heappop(heap)
        if lb > best - tol or _cannot_beat(table, lo, hi, best - tol):
            continue
        if nodes >= max_nodes:
            heapq.heappush(heap, (lb, next(counter), lo, hi))
            break
        nodes += 1
        completion = _greedy_fill(table, lo, hi)
        ub = table.beta(completion)
        if _better(table, ub, completion, best, best_bits):
            best_bits, best = completion, ub
        if check_bounds:
            node = BnBNode(lo, hi, lb, ub, best_bits)
            _check_sandwich(table, node, check_rng, check_samples)
        if np.array_equal(lo, hi):
            continue
        width = hi - lo
        i = int(np.argmax(width))
        mid = (lo[i] + hi[i]) // 2
        for new_lo_i, new_hi_i in ((lo[i], mid), (mid + 1, hi[i])):
            clo, chi = lo.copy(), hi.copy()
            clo[i], chi[i] = new_lo_i, new_hi_i
            if table.power(clo) > table.budget:
                continue
            chi = _tighten(table, clo, chi)
            child_lb = _lower_bound(table, clo, chi)
            if child_lb <= best - tol:
                heapq.heappush(heap, (child_lb, next(counter), clo, chi))

    live = [h[0] for h in heap if h[0] <= best - tol]
    converged = not live
    gap = 0.0 if converged else float(best - min(live))
    return _finish(table, scenario, best_bits, nodes, gap, converged, "branch-and-bound")


def _check_sandwich(table: BitTable, node: BnBNode, gen: np.random.Generator, samples: int):
    assert node.lower_bound <= node.upper_bound + 1e-12, "lower bound above upper bound"
    for _ in range(samples):
        bits = gen.integers(node.lo, node.hi + 1)
        if not table.feasible(bits):
            continue
        b = table.beta(bits)
        assert node.lower_bound <= b + 1e-12, f"lower bound {node.lower_bound} above sampled beta {b}"


def exhaustive_grid_oracle(
    scenario: Scenario, budget: float, p_fa: float = 0.1, grid_steps: int = 200
) -> PowerAllocation:
    """Brute-force minimum of ``beta`` over the discretized power simplex.

    Enumerates every power vector with entries ``k_i * budget / grid_steps``
    and ``sum(k) <= grid_steps``. Objective values come from
    :func:`beta_objective`, evaluated once per distinct bit vector. For
    validation only: the cost grows like ``grid_steps ** M``.
    """
    m = scenario.m
    if m > 4:
        raise ValueError("the grid oracle is limited to M <= 4 sensors")
    step = budget / grid_steps
    gains, zeta = scenario.channel_gain, scenario.comm_noise_var

    # distinct bit vectors, each with its lexicographically smallest power vector
    seen: dict[tuple, np.ndarray] = {}
    for k in _compositions(m, grid_steps):
        powers = k * step
        bits = bits_for_power_array(powers, gains, zeta)
        codes = np.ravel_multi_index(bits.T, (MAX_BITS + 1,) * m)
        _, first = np.unique(codes, return_index=True)
        for idx in first:
            seen.setdefault(tuple(int(b) for b in bits[idx]), powers[idx])
    best_key, best_beta, best_p = None, math.inf, None
    for key in sorted(seen):
        p = seen[key]
        b = beta_objective(p, scenario, p_fa)
        if best_key is None or b < best_beta - 1e-12 or (
            abs(b - best_beta) <= 1e-12 and tuple(p) < tuple(best_p)
        ):
            best_key, best_beta, best_p = key, b, p
    bits = np.array(best_key, dtype=int)
    return PowerAllocation(
        powers=np.asarray(best_p, dtype=float),
        budget=float(budget),
        bits=bits,
        objective=detection_probability(best_beta, p_fa),
        beta=best_beta,
        nodes=len(seen),
        method="grid-oracle",
    )


def _compositions(m: int, total: int, chunk_rows: int = 2_000_000):
    """Yield all nonnegative integer ``m``-vectors with sum ``<= total``,
    in lexicographic order, as ``(rows, m)`` chunks."""
    if m == 1:
        yield np.arange(total + 1)[:, None]
        return
    pending, size = [], 0
    for first in range(total + 1):
        for tail in _compositions(m - 1, total - first, chunk_rows):
            block = np.empty((tail.shape[0], m), dtype=int)
            block[:, 0] = first
            block[:, 1:] = tail
            pending.append(block)
            size += block.shape[0]
            if size >= chunk_rows:
                yield np.concatenate(pending)
                pending, size = [], 0
    if pending:
        yield np.concatenate(pending)


ALLOCATION_COLUMNS = ("sensor", "channel_gain", "channel_quality", "snr", "power", "bits", "weight")


def write_allocation_csv(allocation: PowerAllocation, scenario: Scenario, path) -> None:
    """One row per sensor; ``weight`` is the quantized optimal weight at the allocated power."""
    allocated = scenario.with_powers(allocation.powers)
    weights = quantized_weights("optimal", allocated).weights
    quality = scenario.channel_gain**2 / scenario.comm_noise_var
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ALLOCATION_COLUMNS)
        for i in range(scenario.m):
            writer.writerow(
                [
                    i + 1,
                    repr(float(scenario.channel_gain[i])),
                    repr(float(quality[i])),
                    repr(float(scenario.snr[i])),
                    repr(float(allocation.powers[i])),
                    int(allocation.bits[i]),
                    repr(float(weights[i])),
                ]
            )
