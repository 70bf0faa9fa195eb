"""covertsim threshold / avg-error / outage / error-curve.

Usage
-----
    covertsim threshold --grid lin:0:4:81
    covertsim avg-error --sweep p_ab:lin:0:999:100 --p-ac 1
    covertsim outage --receiver bob --grid lin:0:2:41
    covertsim error-curve --g-hat 0.05
"""

from __future__ import annotations

from ..detection import (
    conditional_error_at_optimum,
    covertness_level,
    error_sum_curve,
    optimal_threshold,
)
from ..models import (
    ExperimentConfig,
    GridSpec,
    OutageSpec,
    Receiver,
    SweepSpec,
    SystemParams,
    derive_willie_view,
    require_valid,
)
from ..outage import outage
from .common import Table, execute, sweep_table

THRESHOLD_GRID = GridSpec("lin", 0.0, 4.0, 81)
OUTAGE_GRID = GridSpec("lin", 0.0, 8.0, 81)
AVG_ERROR_POINTS = 101
ERROR_CURVE_POINTS = 201
# λ grid for error-curve reaches this many ζ1·β_w past the clamp threshold.
ERROR_CURVE_SPAN = 20.0


def _threshold_table(experiment: ExperimentConfig, params: SystemParams) -> Table:
    view = derive_willie_view(params)
    rows = []
    for g in (experiment.grid or THRESHOLD_GRID).values():
        realized = view.with_gain(g)
        decision = optimal_threshold(realized)
        rows.append([g, decision.lambda_star, decision.branch, conditional_error_at_optimum(realized)])
    return ["g_hat", "lambda_star", "branch", "error_sum"], rows


def _outage_table(experiment: ExperimentConfig, params: SystemParams) -> Table:
    cap = experiment.delta_c if experiment.receiver is Receiver.CAROL else experiment.delta_b
    rows = []
    for rate in (experiment.grid or OUTAGE_GRID).values():
        spec = OutageSpec(receiver=experiment.receiver, rate=rate, hypothesis=experiment.hypothesis, delta_cap=cap)
        rows.append([rate, outage(params, spec)])
    return ["rate", "delta"], rows


def _error_curve_table(experiment: ExperimentConfig, params: SystemParams) -> Table:
    view = derive_willie_view(params).with_gain(experiment.g_hat)
    grid = experiment.grid
    if grid is None:
        stop = experiment.g_hat * view.zeta1 + view.sigma2_w + ERROR_CURVE_SPAN * view.zeta1 * view.beta_w
        grid = GridSpec("lin", view.sigma2_w, stop, ERROR_CURVE_POINTS)
    lambdas = grid.values()
    fa, md, total = error_sum_curve(view, lambdas)
    rows = [[lam, float(a), float(b), float(s)] for lam, a, b, s in zip(lambdas, fa, md, total, strict=True)]
    return ["lambda", "p_fa", "p_md", "error_sum"], rows


def _avg_error_build(experiment: ExperimentConfig) -> Table:
    params = experiment.params
    sweep = experiment.sweep
    if sweep is None:
        top = max(params.p_total - params.p_ac, 0.0)
        sweep = SweepSpec("p_ab", GridSpec("lin", 0.0, top, AVG_ERROR_POINTS))
    rows = [[value, covertness_level(require_valid(swept))] for value, swept in sweep.apply(params)]
    return [sweep.name, "avg_error"], rows


def cmd_threshold(args) -> int:
    """Handle 'covertsim threshold'."""
    return execute(args, "threshold", lambda exp: sweep_table(exp, _threshold_table))


def cmd_avg_error(args) -> int:
    """Handle 'covertsim avg-error'."""
    return execute(args, "avg-error", _avg_error_build)


def cmd_outage(args) -> int:
    """Handle 'covertsim outage'."""
    return execute(args, "outage", lambda exp: sweep_table(exp, _outage_table))


def cmd_error_curve(args) -> int:
    """Handle 'covertsim error-curve'."""
    return execute(args, "error-curve", lambda exp: sweep_table(exp, _error_curve_table))


__all__ = ["cmd_avg_error", "cmd_error_curve", "cmd_outage", "cmd_threshold"]
