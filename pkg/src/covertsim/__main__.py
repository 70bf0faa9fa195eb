"""
covertsim — covert communication under channel uncertainty
Entry point / sub-command dispatcher.

Sub-commands
------------
  covertsim threshold     Willie's optimal threshold over a g_hat grid
  covertsim avg-error     Average detection error over a swept parameter
  covertsim outage        Outage probability over a rate grid
  covertsim error-curve   P_FA, P_MD and their sum over a threshold grid
  covertsim region        Covert rate-region boundary points
  covertsim baseline      Rate region without the covertness constraint
  covertsim mc-validate   Closed forms against the Monte Carlo oracle
  covertsim config PATH   Write the effective settings to a config file

All CSV goes to --out (default: standard output).  Exit status is 0 on
success, 2 on invalid input and 3 on an internal numerical failure.
"""

from __future__ import annotations

import multiprocessing
import sys

# MUST set multiprocessing start method BEFORE any multiprocessing usage.
if __name__ == "__main__":
    try:
        multiprocessing.set_start_method("spawn", force=True)
    except RuntimeError:
        pass

import argparse

from .models import Hypothesis, Receiver

# ---------------------------------------------------------------------------
# Argument parser
# ---------------------------------------------------------------------------

_PARAM_FLAGS: tuple[tuple[str, str], ...] = (
    ("--p-ac", "Power towards Carol (linear)"),
    ("--p-ab", "Power towards Bob (linear)"),
    ("--p-total-db", "Total transmit power budget in dB"),
    ("--d-ac", "Distance Alice-Carol"),
    ("--d-ab", "Distance Alice-Bob"),
    ("--d-aw", "Distance Alice-Willie"),
    ("--alpha", "Path-loss exponent"),
    ("--sigma2-c", "Noise variance at Carol"),
    ("--sigma2-b", "Noise variance at Bob"),
    ("--sigma2-w", "Noise variance at Willie"),
    ("--beta", "Channel uncertainty for all three links"),
    ("--beta-c", "Channel uncertainty towards Carol"),
    ("--beta-b", "Channel uncertainty towards Bob"),
    ("--beta-w", "Channel uncertainty towards Willie"),
    ("--eps", "Covertness level: require average detection error >= 1 - eps"),
    ("--delta-c", "Outage cap for Carol"),
    ("--delta-b", "Outage cap for Bob"),
    ("--rate-c", "Carol's target rate (outage, mc-validate)"),
    ("--rate-b", "Bob's target rate (outage, mc-validate)"),
    ("--g-hat", "Realized known gain |h_aw|^2 at Willie"),
)


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    """Attach the scenario, sweep, Monte Carlo and output flags to *parser*.

    Every default is ``None`` so that unset flags fall through to the
    config file and then to the built-in defaults.
    """
    group = parser.add_argument_group("scenario")
    for flag, text in _PARAM_FLAGS:
        group.add_argument(flag, type=float, default=None, help=text)
    group.add_argument("--receiver", choices=[r.value for r in Receiver], default=None)
    group.add_argument("--hypothesis", choices=[h.value for h in Hypothesis], default=None)

    axes = parser.add_argument_group("axes")
    axes.add_argument(
        "--sweep",
        default=None,
        metavar="NAME:lin|log:MIN:MAX:COUNT",
        help="Sweep a scenario parameter (e.g. p_ab:lin:0:999:100).",
    )
    axes.add_argument(
        "--grid",
        default=None,
        metavar="lin|log:MIN:MAX:COUNT",
        help="Command axis: g_hat (threshold), rate (outage), lambda (error-curve).",
    )
    axes.add_argument("--grid-size", type=int, default=None, help="p_ac grid points (region, baseline).")

    mc = parser.add_argument_group("monte carlo")
    mc.add_argument("--trials", type=int, default=None)
    mc.add_argument("--n-uses", type=int, default=None, help="Channel uses per block (finite-n mode).")
    mc.add_argument("--seed", type=int, default=None)
    mc.add_argument(
        "--workers",
        type=int,
        default=None,
        help="Worker processes (default: $COVERTSIM_WORKERS or 1).",
    )

    parser.add_argument("--out", default=None, metavar="PATH", help="CSV destination; '-' = stdout.")
    parser.add_argument(
        "-c",
        "--config",
        default=None,
        metavar="PATH_OR_NAME",
        help="Config file path or bare name to look up in the XDG config dir.",
    )


def _build_parser() -> argparse.ArgumentParser:
    from . import __version__

    parser = argparse.ArgumentParser(
        prog="covertsim",
        description=(
            "covertsim — covert communication over block-fading channels with\n"
            "channel-estimation uncertainty.\n\n"
            "Sub-commands: threshold, avg-error, outage, error-curve, region,\n"
            "baseline, mc-validate, config"
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="Enable DEBUG logging.")
    parser.add_argument(
        "--log-file",
        default=None,
        metavar="PATH",
        help="Write log output to this file.",
    )

    sub = parser.add_subparsers(dest="command")

    for name, text in (
        ("threshold", "Optimal threshold, branch and error sum over a g_hat grid."),
        ("avg-error", "Average detection error at Willie over a swept parameter."),
        ("outage", "Outage probability over a rate grid."),
        ("error-curve", "P_FA, P_MD and error sum over a threshold grid."),
        ("region", "Covert rate-region boundary points."),
        ("baseline", "Rate-region points without the covertness constraint."),
        ("mc-validate", "Check closed forms against Monte Carlo estimates."),
    ):
        _add_param_flags(sub.add_parser(name, help=text, description=text))

    cfg_p = sub.add_parser("config", help="Write the effective settings to a config file.")
    cfg_p.add_argument(
        "path",
        metavar="PATH_OR_NAME",
        help="Destination file path or bare name to save in the XDG config directory.",
    )
    _add_param_flags(cfg_p)

    return parser


# ---------------------------------------------------------------------------
# Main
# ---------------------------------------------------------------------------


def main() -> None:
    parser = _build_parser()
    args = parser.parse_args()

    from .log import setup_logging

    setup_logging("cli", verbose=args.verbose, log_file=args.log_file, console=True)

    command = getattr(args, "command", None)

    # ---- Sub-command dispatch ----------------------------------------------
    if command == "threshold":
        from .cli.analysis import cmd_threshold

        sys.exit(cmd_threshold(args))

    elif command == "avg-error":
        from .cli.analysis import cmd_avg_error

        sys.exit(cmd_avg_error(args))

    elif command == "outage":
        from .cli.analysis import cmd_outage

        sys.exit(cmd_outage(args))

    elif command == "error-curve":
        from .cli.analysis import cmd_error_curve

        sys.exit(cmd_error_curve(args))

    elif command == "region":
        from .cli.region import cmd_region

        sys.exit(cmd_region(args))

    elif command == "baseline":
        from .cli.region import cmd_baseline

        sys.exit(cmd_baseline(args))

    elif command == "mc-validate":
        from .cli.validate import cmd_mc_validate

        sys.exit(cmd_mc_validate(args))

    elif command == "config":
        from .cli.config import cmd_config

        sys.exit(cmd_config(args))

    else:
        parser.print_help()
        sys.exit(0)


if __name__ == "__main__":
    main()
