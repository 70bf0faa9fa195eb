"""Shared numerical helpers used across covertsim modules."""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np

logger = logging.getLogger(__name__)

# exp() of anything below this underflows to zero in float64.
EXP_FLOOR = -745.0

MAX_BISECTION_STEPS = 400


def clamped_exp(exponent):
    """exp(x) with x clamped to [-745, 0]; works on floats and arrays."""
    return np.exp(np.clip(exponent, EXP_FLOOR, 0.0))


def bisect_feasible(
    is_feasible: Callable[[float], bool],
    lo: float,
    hi: float,
    *,
    xtol: float = 0.0,
    rtol: float = 0.0,
    label: str = "bisection",
) -> float:
    """Largest feasible point of a monotone feasibility predicate on [lo, hi].

    ``is_feasible(lo)`` must hold and ``is_feasible(hi)`` must fail; the
    returned value is always a point that was tested feasible (or *lo*),
    within ``xtol + rtol * hi`` of the boundary.
    """
    if xtol <= 0 and rtol <= 0:
        raise ValueError("bisect_feasible needs a positive xtol or rtol")
    steps = 0
    while hi - lo > xtol + rtol * abs(hi) and steps < MAX_BISECTION_STEPS:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if is_feasible(mid):
            lo = mid
        else:
            hi = mid
        steps += 1
    if steps >= MAX_BISECTION_STEPS:
        logger.warning("%s: stopped after %d steps with bracket [%r, %r]", label, steps, lo, hi)
    else:
        logger.debug("%s: converged in %d steps to [%r, %r]", label, steps, lo, hi)
    return lo


__all__ = [
    "EXP_FLOOR",
    "bisect_feasible",
    "clamped_exp",
]
