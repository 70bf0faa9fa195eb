"""covertsim region / baseline — rate-region boundary points as CSV.

Usage
-----
    covertsim region --beta 0.2 --eps 0.2 --alpha 3 --d-ac 5 --d-ab 5 --d-aw 5 --p-total-db 30
    covertsim baseline --grid-size 50 --out baseline.csv
    covertsim region --sweep eps:lin:0.1:0.3:3

Every row is re-certified against detection and outage before it is
written; a point that fails is an internal error (exit 3).
"""

from __future__ import annotations

from rich.table import Table as RichTable

from ..models import ExperimentConfig, NumericalError, RegionPoint, SystemParams
from ..region import certify_point, no_covert_baseline, pareto_frontier, region_boundary
from .common import Table, console, execute, sweep_table

REGION_COLUMNS = ["p_ac", "p_ab", "r_c", "r_b", "covert_margin"]


def _points_table(experiment: ExperimentConfig, params: SystemParams, covert: bool) -> Table:
    solve = region_boundary if covert else no_covert_baseline
    points = solve(
        params,
        grid_size=experiment.grid_size,
        delta_c=experiment.delta_c,
        delta_b=experiment.delta_b,
        workers=experiment.workers,
    )
    rows = []
    for point in points:
        errors = certify_point(point, params, experiment.delta_c, experiment.delta_b, covert=covert)
        if errors:
            raise NumericalError(f"region point at p_ac={point.p_ac!r} failed certification: {'; '.join(errors)}")
        rows.append([point.p_ac, point.p_ab, point.r_c, point.r_b, point.covert_margin])
    return list(REGION_COLUMNS), rows


def _summarize(experiment: ExperimentConfig, table: Table) -> None:
    header, rows = table
    offset = len(header) - len(REGION_COLUMNS)
    points = [RegionPoint(**dict(zip(REGION_COLUMNS, row[offset:], strict=True))) for row in rows]
    frontier = pareto_frontier(points)
    summary = RichTable(title=f"{experiment.command}: {len(rows)} points")
    summary.add_column("quantity")
    summary.add_column("value", justify="right")
    summary.add_row("max r_c", f"{max((p.r_c for p in points), default=0.0):.6g}")
    summary.add_row("max r_b", f"{max((p.r_b for p in points), default=0.0):.6g}")
    summary.add_row("frontier points", str(len(frontier)))
    summary.add_row("min covert margin", f"{min((p.covert_margin for p in points), default=0.0):.3g}")
    console.print(summary)


def cmd_region(args) -> int:
    """Handle 'covertsim region'."""
    return execute(
        args, "region", lambda exp: sweep_table(exp, lambda e, p: _points_table(e, p, True)), _summarize
    )


def cmd_baseline(args) -> int:
    """Handle 'covertsim baseline'."""
    return execute(
        args, "baseline", lambda exp: sweep_table(exp, lambda e, p: _points_table(e, p, False)), _summarize
    )


__all__ = ["cmd_baseline", "cmd_region"]
