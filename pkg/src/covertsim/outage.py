"""Outage probabilities for Carol and Bob, and their inversion to max rates.

Each receiver decodes its own signal treating the other user's signal and
the channel-estimation residual as noise:

    SNR = |ĥ|²·P_sig / (|ĥ|²·P_int + |h̃|²·P_tot + d^α·σ²)

With |ĥ|² ~ Exp(1 − β) and |h̃|² ~ Exp(β) the outage P[SNR < Δ] has the
closed form implemented by :func:`_outage`.  Whenever P_sig − Δ·P_int ≤ 0
the SNR ceiling P_sig/P_int is below Δ and the outage is 1.
"""

from __future__ import annotations

import logging
import math

from .models import (
    Hypothesis,
    OutageSpec,
    ParameterError,
    Receiver,
    SystemParams,
    require_valid,
)
from .utils import bisect_feasible

logger = logging.getLogger(__name__)

RATE_XTOL = 1e-9
UNBOUNDED_RATE_START = 64.0
MAX_RATE_CEILING = 512.0


def snr_threshold(rate: float) -> float:
    """Δ = 2^R − 1."""
    if not rate >= 0:
        raise ParameterError([f"rate must be >= 0, got {rate}"])
    return math.expm1(rate * math.log(2.0))


def _outage(signal: float, interference: float, total: float, loss_noise: float, beta: float, delta: float) -> float:
    if delta == 0.0:
        return 0.0
    p_delta = (1.0 - beta) * (signal - interference * delta)
    if p_delta <= 0.0:
        return 1.0
    # 1 − exp(−Δ·d^α·σ²/P_Δ) / (1 + β·Δ·P_tot/P_Δ)
    return -math.expm1(-math.log1p(beta * delta * total / p_delta) - delta * loss_noise / p_delta)


def link_budget(params: SystemParams, receiver: Receiver, hypothesis: Hypothesis) -> tuple[float, float, float, float, float]:
    """(signal, interference, total, d^α·σ², β) seen by *receiver*."""
    if receiver is Receiver.CAROL:
        loss_noise = params.path_loss(Receiver.CAROL) * params.sigma2_c
        if hypothesis is Hypothesis.H0:
            return params.p_ac, 0.0, params.p_ac, loss_noise, params.beta_c
        return params.p_ac, params.p_ab, params.p_ac + params.p_ab, loss_noise, params.beta_c
    if hypothesis is Hypothesis.H0:
        raise ParameterError(["receiver bob has no covert transmission under h0"])
    loss_noise = params.path_loss(Receiver.BOB) * params.sigma2_b
    return params.p_ab, params.p_ac, params.p_ac + params.p_ab, loss_noise, params.beta_b


def outage_carol_h1(params: SystemParams, rate: float) -> float:
    """Carol's outage with Bob's covert signal present as interference."""
    return _outage(*link_budget(params, Receiver.CAROL, Hypothesis.H1), snr_threshold(rate))


def outage_carol_h0(params: SystemParams, rate: float) -> float:
    """Carol's outage when Alice is silent towards Bob; independent of p_ab."""
    return _outage(*link_budget(params, Receiver.CAROL, Hypothesis.H0), snr_threshold(rate))


def outage_bob_h1(params: SystemParams, rate: float) -> float:
    """Bob's outage, interference-limited by Carol's cover signal."""
    return _outage(*link_budget(params, Receiver.BOB, Hypothesis.H1), snr_threshold(rate))


def outage(params: SystemParams, spec: OutageSpec) -> float:
    require_valid(params)
    return _outage(*link_budget(params, spec.receiver, spec.hypothesis), spec.snr_threshold)


def max_rate(
    params: SystemParams,
    receiver: Receiver,
    hypothesis: Hypothesis = Hypothesis.H1,
    delta_cap: float = 0.1,
) -> float:
    """sup{R ≥ 0 : outage(R) ≤ delta_cap}, to 1e-9 bits per channel use."""
    spec = OutageSpec(receiver=receiver, rate=0.0, hypothesis=hypothesis, delta_cap=delta_cap)
    require_valid(params)
    signal, interference, total, loss_noise, beta = link_budget(params, spec.receiver, spec.hypothesis)

    def feasible(rate: float) -> bool:
        return _outage(signal, interference, total, loss_noise, beta, snr_threshold(rate)) <= delta_cap

    if signal <= 0.0 or not feasible(0.0):
        return 0.0

    if interference > 0.0:
        hi = math.log2(1.0 + signal / interference)
    else:
        hi = UNBOUNDED_RATE_START
        while feasible(hi):
            hi *= 2.0
            if hi > MAX_RATE_CEILING:
                raise ParameterError([f"{receiver.value} rate unbounded below outage cap {delta_cap}"])
    if feasible(hi):
        return hi
    rate = bisect_feasible(feasible, 0.0, hi, xtol=RATE_XTOL, label=f"max_rate[{receiver.value},{hypothesis.value}]")
    logger.debug(
        "max_rate %s/%s cap=%r: R=%r (bracket hi=%r)", receiver.value, hypothesis.value, delta_cap, rate, hi
    )
    return rate


__all__ = [
    "link_budget",
    "max_rate",
    "outage",
    "outage_bob_h1",
    "outage_carol_h0",
    "outage_carol_h1",
    "snr_threshold",
]
