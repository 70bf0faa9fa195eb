"""Tests for covertsim.detection — Willie's radiometer and averaged error."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from covertsim import detection
from covertsim.detection import (
    average_detection_error,
    average_detection_error_closed_form,
    average_detection_error_quadrature,
    conditional_error_at_optimum,
    conditional_errors,
    covertness_level,
    error_sum,
    error_sum_curve,
    lambda_dagger,
    optimal_threshold,
    optimal_thresholds,
    p_fa,
    p_md,
)
from covertsim.models import (
    DegenerateHypothesisError,
    NumericalError,
    ParameterError,
    SystemParams,
    ThresholdBranch,
    WillieChannelView,
)

LN2 = math.log(2.0)


@pytest.fixture
def view() -> WillieChannelView:
    """ζ0=0.08, ζ1=0.16 (p_ac = p_ab = 10 at d_aw = 5, α = 3)."""
    return WillieChannelView(zeta0=0.08, zeta1=0.16, beta_w=0.2, sigma2_w=1.0)


def _random_views(rng, count, *, zeta0=(0.01, 10.0), ratio=(1.0, 10.0), beta=(0.05, 0.95), sigma2=(0.1, 10.0)):
    z0 = np.exp(rng.uniform(math.log(zeta0[0]), math.log(zeta0[1]), count))
    # strictly above the lower ratio bound
    r = ratio[0] + (ratio[1] - ratio[0]) * (1.0 - rng.uniform(0.0, 1.0, count))
    b = rng.uniform(*beta, count)
    s = rng.uniform(*sigma2, count) if sigma2[0] != sigma2[1] else np.full(count, sigma2[0])
    return [WillieChannelView(float(z), float(z * q), float(bb), float(ss)) for z, q, bb, ss in zip(z0, r, b, s)]


class TestLambdaDagger:
    def test_reference_value(self, view):
        assert lambda_dagger(view) == pytest.approx(1.0 + 0.032 * LN2, rel=1e-14)
        assert lambda_dagger(view) == pytest.approx(1.0221807, abs=1e-7)

    def test_independent_of_g_hat(self, view):
        assert lambda_dagger(view.with_gain(0.0)) == lambda_dagger(view.with_gain(3.7))

    def test_limit_equal_zetas(self):
        z = 0.3
        near = WillieChannelView(zeta0=z, zeta1=z * (1.0 + 1e-9), beta_w=0.4, sigma2_w=2.0)
        assert lambda_dagger(near) == pytest.approx(2.0 + 0.4 * z, rel=1e-8)

    def test_small_beta_does_not_overflow(self):
        tiny = WillieChannelView(zeta0=0.08, zeta1=0.16, beta_w=1e-300, sigma2_w=1.0)
        assert lambda_dagger(tiny) == pytest.approx(1.0)

    def test_degenerate(self):
        with pytest.raises(DegenerateHypothesisError):
            lambda_dagger(WillieChannelView(zeta0=0.1, zeta1=0.1, beta_w=0.2, sigma2_w=1.0))

    def test_above_noise_floor(self, rng):
        for v in _random_views(rng, 200):
            assert lambda_dagger(v) > v.sigma2_w


class TestErrorProbabilities:
    def test_false_alarm_reference(self, view):
        assert p_fa(view.with_gain(0.0), lambda_dagger(view)) == pytest.approx(0.25, rel=1e-12)

    def test_missed_detection_reference(self, view):
        assert p_md(view.with_gain(0.0), lambda_dagger(view)) == pytest.approx(0.5, rel=1e-12)

    def test_false_alarm_at_and_below_edge(self, view):
        v = view.with_gain(0.7)
        edge = 0.7 * v.zeta0 + v.sigma2_w
        assert p_fa(v, edge) == 1.0
        assert p_fa(v, edge - 0.01) == 1.0

    def test_missed_detection_below_edge(self, view):
        v = view.with_gain(0.7)
        edge = 0.7 * v.zeta1 + v.sigma2_w
        assert p_md(v, edge) == 0.0
        assert p_md(v, edge - 0.5) == 0.0

    def test_missed_detection_large_threshold(self, view):
        assert p_md(view.with_gain(0.1), 1e6) == 1.0

    def test_first_regime_sum_is_one(self, view):
        v = view.with_gain(0.4)
        assert error_sum(v, 0.4 * v.zeta0 + v.sigma2_w - 1e-3).error_sum == 1.0

    def test_sum_at_clamp_edge(self, view):
        g = 0.9
        v = view.with_gain(g)
        result = error_sum(v, g * v.zeta1 + v.sigma2_w)
        expected = math.exp(g * (v.zeta0 - v.zeta1) / (v.zeta0 * v.beta_w))
        assert result.error_sum == pytest.approx(expected, rel=1e-12)

    def test_sum_is_exact_sum(self, rng):
        for v in _random_views(rng, 300):
            g = float(rng.exponential(1.0 - v.beta_w))
            lam = float(rng.uniform(v.sigma2_w * 0.5, v.sigma2_w + 5.0 * v.zeta1))
            result = error_sum(v.with_gain(g), lam)
            assert result.error_sum == result.p_fa + result.p_md
            assert 0.0 <= result.p_fa <= 1.0 and 0.0 <= result.p_md <= 1.0

    def test_continuity_at_breakpoints(self, rng):
        for v in _random_views(rng, 200):
            g = float(rng.exponential(1.0 - v.beta_w))
            w = v.with_gain(g)
            for edge in (g * w.zeta0 + w.sigma2_w, g * w.zeta1 + w.sigma2_w):
                left = error_sum(w, np.nextafter(edge, -np.inf)).error_sum
                right = error_sum(w, np.nextafter(edge, np.inf)).error_sum
                # one ulp either side, scaled by the steepest exponent
                tol = 1e-12 + 4.0 * np.spacing(edge) / (w.zeta0 * w.beta_w)
                assert abs(left - right) <= tol

    def test_requires_realized_gain(self, view):
        with pytest.raises(ParameterError):
            p_fa(view, 1.0)

    def test_curve_matches_scalar(self, view):
        v = view.with_gain(0.3)
        lambdas = np.linspace(0.9, 1.5, 37)
        fa, md, total = error_sum_curve(v, lambdas)
        for i, lam in enumerate(lambdas):
            scalar = error_sum(v, float(lam))
            assert fa[i] == pytest.approx(scalar.p_fa, rel=1e-14)
            assert md[i] == pytest.approx(scalar.p_md, rel=1e-14, abs=1e-300)
            assert total[i] == pytest.approx(scalar.error_sum, rel=1e-14)


class TestOptimalThreshold:
    def test_zero_gain_takes_dagger(self, view):
        decision = optimal_threshold(view.with_gain(0.0))
        assert decision.branch is ThresholdBranch.DAGGER
        assert decision.lambda_star == decision.lambda_dagger

    def test_large_gain_clamps(self, view):
        g = 100.0 * (1.0 - view.beta_w)
        decision = optimal_threshold(view.with_gain(g))
        assert decision.branch is ThresholdBranch.CLAMP
        assert decision.lambda_star == g * view.zeta1 + view.sigma2_w

    def test_reference_boundary(self, view):
        boundary = (lambda_dagger(view) - view.sigma2_w) / view.zeta1
        assert boundary == pytest.approx(0.2 * LN2, rel=1e-12)
        assert boundary == pytest.approx(0.1386, abs=1e-4)
        decision = optimal_threshold(view.with_gain(0.05))
        assert decision.branch is ThresholdBranch.DAGGER
        assert decision.lambda_star == pytest.approx(1.0221807, abs=1e-7)

    def test_tie_goes_to_dagger(self, view):
        decision = optimal_threshold(view.with_gain(detection._branch_boundary(view)))
        assert decision.branch is ThresholdBranch.DAGGER

    def test_threshold_never_below_noise(self, rng):
        for v in _random_views(rng, 200):
            g = float(rng.exponential(3.0))
            assert optimal_threshold(v.with_gain(g)).lambda_star >= v.sigma2_w

    def test_vectorized_matches_scalar(self, view):
        gains = np.array([0.0, 0.05, 0.2, 1.0, 5.0])
        vector = optimal_thresholds(view, gains)
        for g, lam in zip(gains, vector):
            assert optimal_threshold(view.with_gain(float(g))).lambda_star == lam

    def test_optimal_over_grid(self, rng):
        """λ* beats every point of a 10⁴-point λ grid, 1000 random draws."""
        for v in _random_views(rng, 1000):
            g = float(rng.exponential(2.0 * (1.0 - v.beta_w)))
            w = v.with_gain(g)
            best = error_sum(w, optimal_threshold(w).lambda_star).error_sum
            grid = np.linspace(w.sigma2_w, g * w.zeta1 + w.sigma2_w + 20.0 * w.zeta1 * w.beta_w, 10_000)
            _, _, curve = error_sum_curve(w, grid)
            assert best <= curve.min() + 1e-12

    def test_stationary_at_dagger(self, rng):
        for v in _random_views(rng, 1000, zeta0=(0.2, 2.0), ratio=(1.0, 5.0), beta=(0.1, 0.9), sigma2=(1.0, 1.0)):
            g = float(rng.uniform(0.0, 0.5)) * detection._branch_boundary(v)
            w = v.with_gain(g)
            lam = lambda_dagger(w)
            h = 1e-6 * lam
            slope = (error_sum(w, lam + h).error_sum - error_sum(w, lam - h).error_sum) / (2.0 * h)
            assert abs(slope) <= 1e-6

    def test_convex_at_dagger(self, rng):
        for v in _random_views(rng, 1000, zeta0=(0.2, 2.0), ratio=(1.1, 5.0), beta=(0.1, 0.9), sigma2=(1.0, 1.0)):
            g = float(rng.uniform(0.0, 0.5)) * detection._branch_boundary(v)
            w = v.with_gain(g)
            lam = lambda_dagger(w)
            h = 1e-2 * (lam - w.sigma2_w)
            f = [error_sum(w, lam + k * h).error_sum for k in (-1, 0, 1)]
            assert (f[0] - 2.0 * f[1] + f[2]) / (h * h) > 0.0


class TestConditionalError:
    def test_matches_error_sum_at_optimum(self, rng):
        for v in _random_views(rng, 500):
            w = v.with_gain(float(rng.exponential(1.5)))
            lam = optimal_threshold(w).lambda_star
            assert conditional_error_at_optimum(w) == error_sum(w, lam).error_sum

    def test_dagger_reference(self, view):
        lam = lambda_dagger(view)
        expected = 1.0 - math.exp((1.0 - lam) / (0.16 * 0.2)) + math.exp((1.0 - lam) / (0.08 * 0.2))
        assert conditional_error_at_optimum(view.with_gain(0.0)) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(0.75, rel=1e-12)

    def test_clamp_reference(self, view):
        g = 2.0
        expected = math.exp(g * (0.08 - 0.16) / (0.08 * 0.2))
        assert conditional_error_at_optimum(view.with_gain(g)) == pytest.approx(expected, rel=1e-12)

    def test_range(self, rng):
        for v in _random_views(rng, 300):
            value = conditional_error_at_optimum(v.with_gain(float(rng.exponential(1.0))))
            assert 0.0 <= value <= 1.0

    def test_vectorized_matches_scalar(self, view):
        gains = np.array([0.0, 0.1, 0.138, 0.5, 3.0])
        values = conditional_errors(view, gains)
        for g, value in zip(gains, values):
            assert conditional_error_at_optimum(view.with_gain(float(g))) == pytest.approx(value, rel=1e-14)


class TestAverageDetectionError:
    def test_reference_value(self, view):
        assert average_detection_error(view) == pytest.approx(0.18637715706270453, rel=1e-12)

    def test_from_params(self):
        params = SystemParams(p_ac=10.0, p_ab=10.0, beta_w=0.2)
        assert average_detection_error(params) == pytest.approx(0.18637715706270453, rel=1e-12)

    def test_closed_form_matches_quadrature(self):
        betas = np.concatenate([np.linspace(0.05, 0.45, 5), np.linspace(0.55, 0.95, 5)])
        for beta in betas:
            for zeta0 in np.geomspace(0.01, 10.0, 10):
                for ratio in np.linspace(1.5, 10.0, 10):
                    v = WillieChannelView(float(zeta0), float(zeta0 * ratio), float(beta), 1.0)
                    closed = average_detection_error_closed_form(v)
                    quad = average_detection_error_quadrature(v)
                    assert closed == pytest.approx(quad, rel=1e-9)

    def test_close_to_half_still_accurate(self):
        for beta in (0.5 - 1e-5, 0.5 + 1e-5, 0.5 + 1e-3):
            v = WillieChannelView(0.08, 0.2, beta, 1.0)
            assert average_detection_error_closed_form(v) == pytest.approx(
                average_detection_error_quadrature(v), rel=1e-9
            )

    def test_half_uses_quadrature(self):
        v = WillieChannelView(0.08, 0.16, 0.5, 1.0)
        assert average_detection_error(v) == average_detection_error_quadrature(v)
        with pytest.raises(ParameterError):
            average_detection_error_closed_form(v)

    def test_vanishing_covert_power(self):
        assert average_detection_error(SystemParams(p_ac=500.0, p_ab=1e-9)) == pytest.approx(1.0, abs=1e-6)

    def test_depends_only_on_power_ratio(self):
        a = average_detection_error(SystemParams(p_ac=500.0, p_ab=40.0, sigma2_w=1.0))
        b = average_detection_error(SystemParams(p_ac=50.0, p_ab=4.0, sigma2_w=7.0, d_aw=2.0))
        assert a == pytest.approx(b, rel=1e-12)

    def test_strictly_decreasing_in_covert_power(self, base_params):
        values = [
            average_detection_error(replace(base_params, p_ab=float(p))) for p in np.linspace(1.0, 500.0, 60)
        ]
        assert all(later < earlier for earlier, later in zip(values, values[1:]))

    def test_range(self, rng):
        for v in _random_views(rng, 200):
            assert 0.0 < average_detection_error(v) <= 1.0

    def test_degenerate(self):
        with pytest.raises(DegenerateHypothesisError):
            average_detection_error(SystemParams(p_ab=0.0))

    def test_covertness_level_silence(self):
        assert covertness_level(SystemParams(p_ab=0.0)) == 1.0

    def test_quadrature_error_is_numerical(self):
        assert issubclass(detection.QuadratureError, NumericalError)
