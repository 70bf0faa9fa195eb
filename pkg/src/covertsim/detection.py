"""Willie's radiometer: error probabilities, optimal threshold, averaged error.

Everything here works in the asymptotic regime (n → ∞), where Willie's
normalized received power under hypothesis i is exactly
σ_w² + (|ĥ_aw|² + |h̃_aw|²)·ζ_i.  Per-realization functions take a
:class:`WillieChannelView` carrying the realized known gain ``g_hat``;
channel-averaged functions take the view (or the full params) without it.

Closed-form average
-------------------
Integrating the error at the optimum against the Exp(1 − β_w) density of
``g_hat`` term by term gives, with x = ζ1/ζ0 − 1 and a = (λ† − σ_w²)/ζ1,

    P̄ = 1 − u + β/(1 − 2β)·(E1 − u)·x/(1 + x) + u/((1 + x)(1 + x(1 − β)/β))

where E1 = exp(−a/β) and u = exp(−a/(1 − β)).  The pole at β = 1/2 is
removable; within 1e-6 of it the quadrature of the conditional error is
returned instead.
"""

from __future__ import annotations

import logging
import math
import warnings

import numpy as np
from scipy import integrate

from .models import (
    DegenerateHypothesisError,
    DetectionResult,
    NumericalError,
    ParameterError,
    SystemParams,
    ThresholdBranch,
    ThresholdDecision,
    WillieChannelView,
    derive_willie_view,
    require_valid,
)
from .utils import EXP_FLOOR, clamped_exp

logger = logging.getLogger(__name__)

# Closed form is bypassed when |2β_w − 1| is below this.
SINGULARITY_BAND = 1e-6

QUAD_TOLERANCE = 1e-10
QUAD_EPSABS = 1e-14
QUAD_EPSREL = 1e-12


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""


def _check_view(view: WillieChannelView) -> None:
    if not view.zeta1 > view.zeta0:
        raise DegenerateHypothesisError()


def _require_gain(view: WillieChannelView) -> float:
    if view.g_hat is None:
        raise ParameterError(["g_hat must be set for a per-realization evaluation"])
    return view.g_hat


def _dagger_offset(view: WillieChannelView) -> float:
    """λ† − σ_w² = ζ1·β_w·ln(1 + x)/x with x = (ζ1 − ζ0)/ζ0."""
    x = view.ratio_excess
    return view.zeta1 * view.beta_w * (math.log1p(x) / x)


def _branch_boundary(view: WillieChannelView) -> float:
    return _dagger_offset(view) / view.zeta1


# ---------------------------------------------------------------------------
# Per-realization error probabilities
# ---------------------------------------------------------------------------


def error_terms(view: WillieChannelView, g_hat, lambda_):
    """Vectorized (p_fa, p_md) for any broadcastable g_hat and λ."""
    g = np.asarray(g_hat, dtype=float)
    lam = np.asarray(lambda_, dtype=float)
    fa_edge = g * view.zeta0 + view.sigma2_w
    md_edge = g * view.zeta1 + view.sigma2_w
    p_fa = np.where(lam >= fa_edge, clamped_exp((fa_edge - lam) / (view.zeta0 * view.beta_w)), 1.0)
    md_exponent = np.clip((md_edge - lam) / (view.zeta1 * view.beta_w), EXP_FLOOR, 0.0)
    p_md = np.where(lam >= md_edge, -np.expm1(md_exponent), 0.0)
    return p_fa, p_md


def lambda_dagger(view: WillieChannelView) -> float:
    """Realization-independent inflection threshold λ†."""
    _check_view(view)
    return view.sigma2_w + _dagger_offset(view)


def p_fa(view: WillieChannelView, lambda_: float) -> float:
    g = _require_gain(view)
    fa, _ = error_terms(view, g, lambda_)
    return float(fa)


def p_md(view: WillieChannelView, lambda_: float) -> float:
    g = _require_gain(view)
    _, md = error_terms(view, g, lambda_)
    return float(md)


def error_sum(view: WillieChannelView, lambda_: float) -> DetectionResult:
    g = _require_gain(view)
    fa, md = error_terms(view, g, lambda_)
    fa, md = float(fa), float(md)
    return DetectionResult(lambda_=float(lambda_), p_fa=fa, p_md=md, error_sum=fa + md)


def error_sum_curve(view: WillieChannelView, lambdas) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(p_fa, p_md, p_fa + p_md) over a grid of thresholds."""
    g = _require_gain(view)
    fa, md = error_terms(view, g, np.asarray(lambdas, dtype=float))
    return fa, md, fa + md


# ---------------------------------------------------------------------------
# Optimal threshold
# ---------------------------------------------------------------------------


def optimal_threshold(view: WillieChannelView) -> ThresholdDecision:
    """λ* = λ† below the branch boundary, else the clamp g·ζ1 + σ_w².

    A gain exactly on the boundary takes the dagger branch; both branches
    give the same λ* there.
    """
    g = _require_gain(view)
    dagger = lambda_dagger(view)
    if g <= _branch_boundary(view):
        return ThresholdDecision(lambda_star=dagger, branch=ThresholdBranch.DAGGER, lambda_dagger=dagger)
    return ThresholdDecision(
        lambda_star=g * view.zeta1 + view.sigma2_w,
        branch=ThresholdBranch.CLAMP,
        lambda_dagger=dagger,
    )


def optimal_thresholds(view: WillieChannelView, g_hats) -> np.ndarray:
    """Vectorized λ* over many realized gains (``view.g_hat`` is ignored)."""
    dagger = lambda_dagger(view)
    g = np.asarray(g_hats, dtype=float)
    return np.where(g <= _branch_boundary(view), dagger, g * view.zeta1 + view.sigma2_w)


def conditional_error_at_optimum(view: WillieChannelView) -> float:
    """P_FA + P_MD at λ*, bit-identical to ``error_sum(view, λ*).error_sum``."""
    decision = optimal_threshold(view)
    return error_sum(view, decision.lambda_star).error_sum


def conditional_errors(view: WillieChannelView, g_hats) -> np.ndarray:
    """Vectorized :func:`conditional_error_at_optimum` over realized gains."""
    g = np.asarray(g_hats, dtype=float)
    fa, md = error_terms(view, g, optimal_thresholds(view, g))
    return fa + md


# ---------------------------------------------------------------------------
# Channel-averaged detection error
# ---------------------------------------------------------------------------


def average_detection_error_closed_form(view: WillieChannelView) -> float:
    """Closed-form average over g_hat ~ Exp(1 − β_w); invalid at β_w = 1/2."""
    _check_view(view)
    beta = view.beta_w
    m = 1.0 - beta
    one_minus_2beta = 1.0 - 2.0 * beta
    if one_minus_2beta == 0.0:
        raise ParameterError(["beta_w = 0.5 has no closed form; use the quadrature"])
    x = view.ratio_excess
    a = _branch_boundary(view)
    e1 = math.exp(max(-a / beta, EXP_FLOOR))
    u = math.exp(max(-a / m, EXP_FLOOR))
    # E1 − u = −E1·expm1(a/β − a/(1−β)), exponent difference formed exactly
    e1_minus_u = -e1 * math.expm1(a * one_minus_2beta / (beta * m))
    weight = x / (1.0 + x)
    body = (beta / one_minus_2beta) * e1_minus_u * weight
    tail = u / ((1.0 + x) * (1.0 + x * m / beta))
    return min(1.0, (1.0 - u) + body + tail)


def average_detection_error_quadrature(view: WillieChannelView) -> float:
    """Adaptive quadrature of the conditional error against Exp(1 − β_w).

    The integral is split at the branch boundary where the integrand has a
    kink.  Raises :class:`QuadratureError` when the summed absolute error
    estimate exceeds 1e-10.
    """
    _check_view(view)
    beta = view.beta_w
    m = 1.0 - beta
    x = view.ratio_excess
    a = _branch_boundary(view)
    weight = x / (1.0 + x)

    def dagger_part(g: float) -> float:
        return (1.0 - math.exp((g - a) / beta) * weight) * math.exp(-g / m) / m

    def clamp_part(g: float) -> float:
        return math.exp(-g * x / beta - g / m) / m

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        head, head_err = integrate.quad(dagger_part, 0.0, a, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)
        tail, tail_err = integrate.quad(
            clamp_part, a, np.inf, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200
        )
    for w in caught:
        logger.debug("quadrature warning (beta_w=%r, x=%r): %s", beta, x, w.message)
    total_err = head_err + tail_err
    if not total_err <= QUAD_TOLERANCE:
        raise QuadratureError(
            f"quadrature error estimate {total_err:.3g} exceeds {QUAD_TOLERANCE:g} "
            f"(beta_w={beta}, zeta1/zeta0={1.0 + x})"
        )
    return min(1.0, head + tail)


def average_detection_error(params: SystemParams | WillieChannelView) -> float:
    """Willie's minimum error sum averaged over the known channel gain."""
    if isinstance(params, SystemParams):
        view = derive_willie_view(require_valid(params))
    else:
        view = params
    if abs(2.0 * view.beta_w - 1.0) < SINGULARITY_BAND:
        logger.debug("beta_w=%r within the closed-form singularity band; using quadrature", view.beta_w)
        return average_detection_error_quadrature(view)
    return average_detection_error_closed_form(view)


def covertness_level(params: SystemParams) -> float:
    """P̄_E^w, with the silent limit p_ab = 0 mapped to 1."""
    if params.p_ab <= 0:
        return 1.0
    return average_detection_error(params)


__all__ = [
    "QuadratureError",
    "average_detection_error",
    "average_detection_error_closed_form",
    "average_detection_error_quadrature",
    "conditional_error_at_optimum",
    "conditional_errors",
    "covertness_level",
    "error_sum",
    "error_sum_curve",
    "error_terms",
    "lambda_dagger",
    "optimal_threshold",
    "optimal_thresholds",
    "p_fa",
    "p_md",
]
