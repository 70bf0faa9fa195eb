"""covertsim mc-validate — closed forms against the Monte Carlo oracle.

Usage
-----
    covertsim mc-validate --trials 1000000 --seed 42
    covertsim mc-validate --trials 200000 --n-uses 1000 --workers 4

One row per quantity: ``quantity,closed_form,mc_estimate,std_err,sigmas``
where ``sigmas`` is |mc_estimate − closed_form| / std_err.  Rows depend only
on the settings (worker count included), so two runs give identical CSV.
"""

from __future__ import annotations

import math
from dataclasses import replace

from rich.table import Table as RichTable

from ..detection import average_detection_error, error_sum, lambda_dagger
from ..models import ExperimentConfig, Hypothesis, McConfig, Receiver, SystemParams, derive_willie_view
from ..montecarlo import empirical_average_error, empirical_error_sum, empirical_outage
from ..outage import outage_bob_h1, outage_carol_h0, outage_carol_h1
from .common import Table, console, execute, sweep_table

VALIDATE_COLUMNS = ["quantity", "closed_form", "mc_estimate", "std_err", "sigmas"]
SIGMA_BAND = 3.0


def _sigmas(closed: float, estimate: float, std_err: float) -> float:
    gap = abs(estimate - closed)
    if std_err > 0.0:
        return gap / std_err
    return 0.0 if gap == 0.0 else math.inf


def _row(name: str, closed: float, estimate: float, std_err: float) -> list:
    return [name, closed, estimate, std_err, _sigmas(closed, estimate, std_err)]


def _validate_table(experiment: ExperimentConfig, params: SystemParams) -> Table:
    mc = experiment.mc or McConfig(workers=experiment.workers)
    asymptotic = replace(mc, n_uses=None)
    view = derive_willie_view(params)
    realized = view.with_gain(experiment.g_hat)
    dagger = lambda_dagger(view)
    at_dagger = error_sum(realized, dagger)
    average = average_detection_error(params)

    rows = []
    conditioned = empirical_error_sum(params, dagger, asymptotic, g_hat=experiment.g_hat)
    rows.append(_row("p_fa_at_lambda_dagger", at_dagger.p_fa, conditioned.p_fa, conditioned.se_fa))
    rows.append(_row("p_md_at_lambda_dagger", at_dagger.p_md, conditioned.p_md, conditioned.se_md))

    game = empirical_error_sum(params, None, asymptotic)
    rows.append(_row("error_sum_optimal_willie", average, game.error_sum, game.std_error))

    sampled = empirical_average_error(params, asymptotic)
    rows.append(_row("avg_detection_error", average, sampled.mean, sampled.std_error))

    for name, closed_form, receiver, hypothesis, rate in (
        ("outage_carol_h1", outage_carol_h1, Receiver.CAROL, Hypothesis.H1, experiment.rate_c),
        ("outage_carol_h0", outage_carol_h0, Receiver.CAROL, Hypothesis.H0, experiment.rate_c),
        ("outage_bob_h1", outage_bob_h1, Receiver.BOB, Hypothesis.H1, experiment.rate_b),
    ):
        estimate = empirical_outage(params, receiver, hypothesis, rate, asymptotic)
        rows.append(_row(name, closed_form(params, rate), estimate.delta, estimate.std_error))

    if mc.n_uses is not None:
        finite = empirical_error_sum(params, dagger, mc, g_hat=experiment.g_hat)
        rows.append(
            _row(f"error_sum_n{mc.n_uses}_vs_asymptotic", at_dagger.error_sum, finite.error_sum, finite.std_error)
        )
    return list(VALIDATE_COLUMNS), rows


def _summarize(experiment: ExperimentConfig, table: Table) -> None:
    header, rows = table
    offset = len(header) - len(VALIDATE_COLUMNS)
    summary = RichTable(title=f"mc-validate ({experiment.mc.trials if experiment.mc else '?'} trials)")
    summary.add_column("quantity")
    summary.add_column("closed form", justify="right")
    summary.add_column("Monte Carlo", justify="right")
    summary.add_column("sigmas", justify="right")
    for row in rows:
        name, closed, estimate, _, sigmas = row[offset:]
        style = "green" if sigmas <= SIGMA_BAND else "yellow"
        summary.add_row(name, f"{closed:.6g}", f"{estimate:.6g}", f"[{style}]{sigmas:.2f}[/{style}]")
    console.print(summary)


def cmd_mc_validate(args) -> int:
    """Handle 'covertsim mc-validate'."""
    return execute(args, "mc-validate", lambda exp: sweep_table(exp, _validate_table), _summarize)


__all__ = ["cmd_mc_validate"]
