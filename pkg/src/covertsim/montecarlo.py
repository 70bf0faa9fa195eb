"""Monte Carlo oracle for the detection and outage closed forms.

Trials are cut into fixed chunks of ``CHUNK_TRIALS``.  Chunk *k* of stream
*tag* draws from ``Philox(SeedSequence(seed, spawn_key=(tag, k)))``, so the
sample set depends only on the seed and the trial count; workers just
decide where each chunk runs.  Chunk tallies are merged in chunk order,
which makes every estimate bit-identical for any worker count.

Willie's statistic under hypothesis i is

    P_w/n = (σ_w² + (|ĥ_aw|² + |h̃_aw|²)·ζ_i) · χ²_{2n}/(2n)

A complex sample of variance v has |y|² = (v/2)·χ²_2, so summing n of them
and dividing by n gives v·χ²_{2n}/(2n), whose mean is exactly v.  In the
asymptotic mode (``n_uses`` unset) the factor is replaced by 1 and every
trial draws the full channel and counts a hit.

In finite-n mode each trial draws the known gain and one factor G, shared
by both hypotheses, and scores the exact tail over the residual gain at the
scaled threshold λ/G.  With λ = λ† every trial then scores at least the
asymptotic error sum, and the excess shrinks like 1/n.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .detection import conditional_errors, error_terms, optimal_thresholds
from .models import (
    Hypothesis,
    McConfig,
    OutageSpec,
    Receiver,
    SystemParams,
    derive_willie_view,
    require_valid,
)
from .outage import link_budget
from .workers import parallel_map

logger = logging.getLogger(__name__)

CHUNK_TRIALS = 2**16

# Sum-of-normals χ² sampling up to this n, Gamma above.
CHI2_EXACT_MAX_N = 1000

# Normal draws per block when summing squares (bounds memory at large n).
_NORMAL_BLOCK = 2**22

RESOLUTION_TARGET = 1e-2


class StreamTag(IntEnum):
    ERROR_H0 = 1
    ERROR_H1 = 2
    OUTAGE_CAROL = 3
    OUTAGE_BOB = 4
    AVERAGE_ERROR = 5
    ERROR_FINITE = 6


@dataclass(frozen=True)
class ErrorSumEstimate:
    p_fa: float
    p_md: float
    se_fa: float
    se_md: float
    trials: int

    @property
    def error_sum(self) -> float:
        return self.p_fa + self.p_md

    @property
    def std_error(self) -> float:
        return math.hypot(self.se_fa, self.se_md)


@dataclass(frozen=True)
class OutageEstimate:
    delta: float
    std_error: float
    trials: int


@dataclass(frozen=True)
class AverageErrorEstimate:
    mean: float
    std_error: float
    trials: int


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------


def chunk_rng(seed: int, tag: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(int(tag), index))))


def sample_channel(beta: float, rng: np.random.Generator, size: int | None = None):
    """(|ĥ|², |h̃|²): independent exponentials with means 1 − β and β."""
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0,1), got {beta}")
    g_hat = rng.exponential(1.0 - beta, size)
    g_tilde = rng.exponential(beta, size)
    return g_hat, g_tilde


def chi2_factor(rng: np.random.Generator, n_uses: int, size: int) -> np.ndarray:
    """``size`` draws of χ²_{2n}/(2n) (mean 1, variance 1/n)."""
    if n_uses < 1:
        raise ValueError(f"n_uses must be >= 1, got {n_uses}")
    if n_uses > CHI2_EXACT_MAX_N:
        return rng.gamma(shape=n_uses, scale=1.0 / n_uses, size=size)
    dof = 2 * n_uses
    out = np.empty(size)
    rows = max(1, _NORMAL_BLOCK // dof)
    for start in range(0, size, rows):
        stop = min(start + rows, size)
        z = rng.standard_normal((stop - start, dof))
        out[start:stop] = np.einsum("ij,ij->i", z, z)
    return out / dof


def _chunks(trials: int) -> list[tuple[int, int]]:
    full, rest = divmod(trials, CHUNK_TRIALS)
    plan = [(k, CHUNK_TRIALS) for k in range(full)]
    if rest:
        plan.append((full, rest))
    return plan


def _binomial_se(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def _sample_se(total: float, squares: float, trials: int) -> float:
    if trials < 2:
        return 0.0
    mean = total / trials
    variance = max(squares / trials - mean * mean, 0.0) * trials / (trials - 1)
    return math.sqrt(variance / trials)


def _warn_if_coarse(config: McConfig, what: str) -> None:
    if 3.0 * math.sqrt(0.25 / config.trials) > RESOLUTION_TARGET:
        logger.warning(
            "%s: %d trials cannot resolve %g at 3 sigma; estimates are coarse",
            what,
            config.trials,
            RESOLUTION_TARGET,
        )


# ---------------------------------------------------------------------------
# Chunk kernels (top-level so they pickle into worker processes)
# ---------------------------------------------------------------------------


def _error_chunk(
    params: SystemParams,
    lambda_: float | None,
    g_hat: float | None,
    n_uses: int | None,
    seed: int,
    index: int,
    size: int,
) -> tuple[float, float, float, float]:
    """(Σ fa, Σ md, Σ fa², Σ md²) over one chunk."""
    view = derive_willie_view(params)
    if n_uses is not None:
        rng = chunk_rng(seed, StreamTag.ERROR_FINITE, index)
        known, _ = sample_channel(view.beta_w, rng, size)
        if g_hat is not None:
            known = np.full(size, g_hat)
        threshold = optimal_thresholds(view, known) if lambda_ is None else lambda_
        factor = chi2_factor(rng, n_uses, size)
        fa, md = error_terms(view, known, threshold / factor)
        return float(fa.sum()), float(md.sum()), float(np.dot(fa, fa)), float(np.dot(md, md))
    counts = []
    for tag, zeta in ((StreamTag.ERROR_H0, view.zeta0), (StreamTag.ERROR_H1, view.zeta1)):
        rng = chunk_rng(seed, tag, index)
        known, residual = sample_channel(view.beta_w, rng, size)
        if g_hat is not None:
            known = np.full(size, g_hat)
        power = view.sigma2_w + (known + residual) * zeta
        threshold = optimal_thresholds(view, known) if lambda_ is None else lambda_
        if tag is StreamTag.ERROR_H0:
            counts.append(float(np.count_nonzero(power > threshold)))
        else:
            counts.append(float(np.count_nonzero(power < threshold)))
    # indicators square to themselves
    return counts[0], counts[1], counts[0], counts[1]


def _outage_chunk(
    params: SystemParams,
    receiver: Receiver,
    hypothesis: Hypothesis,
    delta: float,
    seed: int,
    index: int,
    size: int,
) -> int:
    signal, interference, total, loss_noise, beta = link_budget(params, receiver, hypothesis)
    tag = StreamTag.OUTAGE_CAROL if receiver is Receiver.CAROL else StreamTag.OUTAGE_BOB
    known, residual = sample_channel(beta, chunk_rng(seed, tag, index), size)
    snr = known * signal / (known * interference + residual * total + loss_noise)
    return int(np.count_nonzero(snr < delta))


def _average_chunk(params: SystemParams, seed: int, index: int, size: int) -> tuple[float, float]:
    view = derive_willie_view(params)
    known, _ = sample_channel(view.beta_w, chunk_rng(seed, StreamTag.AVERAGE_ERROR, index), size)
    errors = conditional_errors(view, known)
    return float(errors.sum()), float(np.dot(errors, errors))


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


def empirical_error_sum(
    params: SystemParams,
    lambda_: float | None,
    config: McConfig,
    g_hat: float | None = None,
) -> ErrorSumEstimate:
    """Empirical (P_FA, P_MD) of Willie's radiometer.

    ``lambda_`` fixes the threshold; ``None`` lets Willie use his optimal
    threshold for each realized |ĥ_aw|².  ``g_hat`` conditions on a known
    gain; ``None`` draws it from Exp(1 − β_w) per trial.  With
    ``config.n_uses`` set, trials score the finite-n tail probabilities
    and the standard errors are sample standard errors.
    """
    require_valid(params)
    derive_willie_view(params)
    _warn_if_coarse(config, "empirical_error_sum")
    jobs = [(params, lambda_, g_hat, config.n_uses, config.seed, k, size) for k, size in _chunks(config.trials)]
    tallies = parallel_map(_error_chunk, jobs, workers=config.workers)
    n = config.trials
    sums = [math.fsum(t[i] for t in tallies) for i in range(4)]
    fa, md = sums[0] / n, sums[1] / n
    logger.debug("empirical_error_sum: %d chunks, p_fa=%r p_md=%r", len(jobs), fa, md)
    if config.n_uses is None:
        se_fa, se_md = _binomial_se(fa, n), _binomial_se(md, n)
    else:
        se_fa, se_md = _sample_se(sums[0], sums[2], n), _sample_se(sums[1], sums[3], n)
    return ErrorSumEstimate(p_fa=fa, p_md=md, se_fa=se_fa, se_md=se_md, trials=n)


def empirical_outage(
    params: SystemParams,
    receiver: Receiver,
    hypothesis: Hypothesis,
    rate: float,
    config: McConfig,
) -> OutageEstimate:
    """Fraction of sampled channels whose SNR falls below 2^R − 1."""
    require_valid(params)
    spec = OutageSpec(receiver=receiver, rate=rate, hypothesis=hypothesis)
    _warn_if_coarse(config, "empirical_outage")
    jobs = [
        (params, receiver, hypothesis, spec.snr_threshold, config.seed, k, size) for k, size in _chunks(config.trials)
    ]
    counts = parallel_map(_outage_chunk, jobs, workers=config.workers)
    delta = sum(counts) / config.trials
    return OutageEstimate(delta=delta, std_error=_binomial_se(delta, config.trials), trials=config.trials)


def empirical_average_error(params: SystemParams, config: McConfig) -> AverageErrorEstimate:
    """Sample mean of the conditional error at the optimum over |ĥ_aw|²."""
    require_valid(params)
    derive_willie_view(params)
    jobs = [(params, config.seed, k, size) for k, size in _chunks(config.trials)]
    sums = parallel_map(_average_chunk, jobs, workers=config.workers)
    n = config.trials
    total = math.fsum(s[0] for s in sums)
    squares = math.fsum(s[1] for s in sums)
    return AverageErrorEstimate(mean=total / n, std_error=_sample_se(total, squares, n), trials=n)


__all__ = [
    "CHUNK_TRIALS",
    "AverageErrorEstimate",
    "ErrorSumEstimate",
    "OutageEstimate",
    "StreamTag",
    "chi2_factor",
    "chunk_rng",
    "empirical_average_error",
    "empirical_error_sum",
    "empirical_outage",
    "sample_channel",
]
