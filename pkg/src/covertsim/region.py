"""Covertness-constrained power allocation and the (R_c, R_b) rate region.

The region is traced by sweeping Carol's power p_ac over a log-spaced grid.
At each grid point Bob gets the largest power Willie cannot detect
(:func:`max_covert_power`), and both rates are the largest ones meeting
their outage caps under H1.
"""

from __future__ import annotations

import logging
from dataclasses import replace

import numpy as np

from .detection import covertness_level
from .models import (
    BUDGET_RTOL,
    Hypothesis,
    NumericalError,
    ParameterError,
    Receiver,
    RegionPoint,
    SystemParams,
    require_valid,
)
from .outage import max_rate, outage_bob_h1, outage_carol_h1
from .utils import bisect_feasible
from .workers import parallel_map

logger = logging.getLogger(__name__)

POWER_RTOL = 1e-9
MONOTONICITY_SAMPLES = 64
MONOTONICITY_SLACK = 1e-12
MARGIN_SLACK = 1e-9
DEFAULT_GRID_SIZE = 200


class MonotonicityError(NumericalError):
    """Sampled P̄_E^w is not non-increasing in p_ab, so bisection is unsafe."""


def _check_monotone(params: SystemParams, cap: float) -> None:
    samples = np.linspace(cap / MONOTONICITY_SAMPLES, cap, MONOTONICITY_SAMPLES)
    levels = [covertness_level(replace(params, p_ab=float(p))) for p in samples]
    for i in range(1, len(levels)):
        if levels[i] > levels[i - 1] + MONOTONICITY_SLACK:
            raise MonotonicityError(
                f"average detection error rises from {levels[i - 1]!r} to {levels[i]!r} "
                f"between p_ab={samples[i - 1]!r} and p_ab={samples[i]!r} (p_ac={params.p_ac!r})"
            )


def max_covert_power(params: SystemParams) -> float:
    """Largest p_ab ∈ [0, p_total − p_ac] with P̄_E^w ≥ 1 − ε.

    ``params.p_ab`` is ignored.  Returns the whole remaining budget when even
    that is covert.
    """
    params = require_valid(replace(params, p_ab=0.0))
    cap = params.p_total - params.p_ac
    if cap <= 0.0:
        return 0.0
    target = 1.0 - params.epsilon

    _check_monotone(params, cap)

    def covert(p_ab: float) -> bool:
        return covertness_level(replace(params, p_ab=p_ab)) >= target

    if covert(cap):
        return cap
    power = bisect_feasible(covert, 0.0, cap, xtol=1e-15 * cap, rtol=POWER_RTOL, label="max_covert_power")
    logger.debug("max_covert_power p_ac=%r eps=%r: p_ab=%r", params.p_ac, params.epsilon, power)
    return power


def _p_ac_grid(p_total: float, grid_size: int) -> np.ndarray:
    if grid_size < 2:
        raise ParameterError([f"grid_size must be >= 2, got {grid_size}"])
    return np.geomspace(p_total / grid_size, p_total, grid_size)


def _solve_point(params: SystemParams, p_ac: float, delta_c: float, delta_b: float, covert: bool) -> RegionPoint:
    """One region point; top-level so it can run in a worker process."""
    base = replace(params, p_ac=p_ac, p_ab=0.0)
    p_ab = max_covert_power(base) if covert else max(params.p_total - p_ac, 0.0)
    split = replace(base, p_ab=p_ab)
    r_c = max_rate(split, Receiver.CAROL, Hypothesis.H1, delta_c)
    r_b = max_rate(split, Receiver.BOB, Hypothesis.H1, delta_b) if p_ab > 0.0 else 0.0
    margin = covertness_level(split) - (1.0 - params.epsilon)
    return RegionPoint(r_c=r_c, r_b=r_b, p_ac=p_ac, p_ab=p_ab, covert_margin=margin)


def _sweep(params: SystemParams, grid_size: int, delta_c: float, delta_b: float, covert: bool, workers: int):
    require_valid(replace(params, p_ab=0.0))
    for name, cap in (("delta_c", delta_c), ("delta_b", delta_b)):
        if not 0.0 < cap < 1.0:
            raise ParameterError([f"{name} out of open interval (0,1): {cap}"])
    jobs = [(params, float(p_ac), delta_c, delta_b, covert) for p_ac in _p_ac_grid(params.p_total, grid_size)]
    logger.debug("region sweep: %d points, covert=%s, workers=%d", len(jobs), covert, workers)
    points = parallel_map(_solve_point, jobs, workers=workers)
    return sorted(points, key=lambda pt: pt.p_ac)


def region_boundary(
    params: SystemParams,
    grid_size: int = DEFAULT_GRID_SIZE,
    delta_c: float = 0.1,
    delta_b: float = 0.1,
    workers: int = 1,
) -> list[RegionPoint]:
    """Covert rate-region points, one per p_ac grid value, ascending in p_ac."""
    return _sweep(params, grid_size, delta_c, delta_b, True, workers)


def no_covert_baseline(
    params: SystemParams,
    grid_size: int = DEFAULT_GRID_SIZE,
    delta_c: float = 0.1,
    delta_b: float = 0.1,
    workers: int = 1,
) -> list[RegionPoint]:
    """Same sweep with p_ab = p_total − p_ac; covert_margin may be negative."""
    return _sweep(params, grid_size, delta_c, delta_b, False, workers)


def pareto_frontier(points: list[RegionPoint]) -> list[RegionPoint]:
    """Non-dominated points in (r_c, r_b), ordered by r_c ascending."""
    frontier: list[RegionPoint] = []
    best_rb = -np.inf
    for point in sorted(points, key=lambda pt: (-pt.r_c, -pt.r_b)):
        if point.r_b > best_rb:
            frontier.append(point)
            best_rb = point.r_b
    frontier.reverse()
    return frontier


def certify_point(
    point: RegionPoint,
    params: SystemParams,
    delta_c: float = 0.1,
    delta_b: float = 0.1,
    covert: bool = True,
) -> list[str]:
    """Re-check a point's invariants at its own power split.

    Returns one message per violation; an empty list means certified.
    ``params`` supplies everything except the split (ε included, so a point
    can be certified against a different covertness level).
    """
    errors: list[str] = []
    if point.p_ac + point.p_ab > params.p_total * (1.0 + BUDGET_RTOL):
        errors.append(f"p_total exceeded: {point.p_ac} + {point.p_ab} > {params.p_total}")
        return errors
    split = replace(params, p_ac=point.p_ac, p_ab=point.p_ab)
    if covert:
        margin = covertness_level(split) - (1.0 - params.epsilon)
        if margin < -MARGIN_SLACK:
            errors.append(f"covert_margin {margin!r} below zero at p_ab={point.p_ab!r}")
    delta = outage_carol_h1(split, point.r_c)
    if delta > delta_c:
        errors.append(f"carol outage {delta!r} exceeds cap {delta_c} at r_c={point.r_c!r}")
    if point.r_b > 0.0:
        delta = outage_bob_h1(split, point.r_b)
        if delta > delta_b:
            errors.append(f"bob outage {delta!r} exceeds cap {delta_b} at r_b={point.r_b!r}")
    return errors


__all__ = [
    "DEFAULT_GRID_SIZE",
    "MonotonicityError",
    "certify_point",
    "max_covert_power",
    "no_covert_baseline",
    "pareto_frontier",
    "region_boundary",
]
