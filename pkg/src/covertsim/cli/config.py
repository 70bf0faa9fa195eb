"""covertsim config — write the effective settings to a config file.

Usage
-----
    covertsim config fig3                   # ~/.config/covertsim/fig3.toml
    covertsim config ./run.toml --beta 0.3 --eps 0.1

The file holds every setting after applying defaults, the ``--config``
file (if any) and the flags, so it can be passed back with ``--config``.
"""

from __future__ import annotations

from ..config import resolve_config_path, save_config
from ..models import ParameterError, require_valid
from .common import EXIT_INVALID, EXIT_OK, console, report_invalid, settings_from_args


def cmd_config(args) -> int:
    """Handle 'covertsim config PATH_OR_NAME'."""
    try:
        settings = settings_from_args(args)
        # parses sweep/grid specs and checks the scenario before anything is written
        require_valid(settings.to_experiment("region").params)
        dest = save_config(settings, resolve_config_path(args.path))
    except ParameterError as exc:
        report_invalid(exc.errors)
        return EXIT_INVALID
    except OSError as exc:
        console.print(f"[red]Cannot write config:[/red] {exc}", highlight=False)
        return EXIT_INVALID
    console.print(f"[green]Saved config to {dest}[/green]", highlight=False)
    return EXIT_OK
