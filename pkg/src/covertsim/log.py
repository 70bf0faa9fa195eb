"""Centralised logging configuration for covertsim.

Each process calls ``setup_logging()`` once at startup.  The root logger
gets a per-process rotating file in the covertsim config directory:

    covertsim-cli.log      the command-line front end
    covertsim-workers.log  ProcessPoolExecutor workers (region, Monte Carlo)

plus, for the front end, a stderr handler (WARNING, or DEBUG with
``--verbose``) and an optional ``--log-file``.  Every record carries the PID
so lines from pool workers sharing a file can be told apart.
"""

from __future__ import annotations

import logging
import logging.handlers
import sys
from pathlib import Path

from .config import config_dir

LOG_FORMAT = "%(asctime)s [%(process)d] %(name)s %(levelname)s %(message)s"
CONSOLE_FORMAT = "%(levelname)s [%(name)s] %(message)s"
LOG_MAX_BYTES = 5 * 1024 * 1024  # 5 MB per file
LOG_BACKUP_COUNT = 2

# Their DEBUG output is noise next to ours.
_THIRD_PARTY_WARNING_LOGGERS: tuple[str, ...] = (
    "concurrent.futures",
    "multiprocessing",
    "asyncio",
    "numpy",
    "scipy",
    "pydantic",
    "rich",
)

_configured_processes: set[str] = set()


def log_path(process_name: str) -> Path:
    return config_dir(create=False) / f"covertsim-{process_name}.log"


def setup_logging(
    process_name: str,
    level: int = logging.DEBUG,
    *,
    verbose: bool = False,
    log_file: str | Path | None = None,
    console: bool = False,
) -> Path:
    """Configure the root logger for one covertsim process.

    Existing root handlers are closed and removed first.  Calling again for
    the same *process_name* is a no-op, so pool workers can call this on every
    job.  Returns the path of the rotating log file.
    """
    path = log_path(process_name)
    if process_name in _configured_processes:
        return path

    root = logging.getLogger()
    for handler in list(root.handlers):
        try:
            handler.close()
        except Exception:
            pass
        root.removeHandler(handler)
    root.setLevel(level)

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fh = logging.handlers.RotatingFileHandler(
            path,
            mode="a",
            maxBytes=LOG_MAX_BYTES,
            backupCount=LOG_BACKUP_COUNT,
            encoding="utf-8",
        )
        fh.setLevel(level)
        fh.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(fh)
    except Exception:
        root.addHandler(logging.NullHandler())

    if console:
        sh = logging.StreamHandler(sys.stderr)
        sh.setLevel(logging.DEBUG if verbose else logging.WARNING)
        sh.setFormatter(logging.Formatter(CONSOLE_FORMAT))
        root.addHandler(sh)

    if log_file:
        try:
            extra = logging.FileHandler(log_file, encoding="utf-8")
            extra.setLevel(logging.DEBUG if verbose else logging.INFO)
            extra.setFormatter(logging.Formatter(LOG_FORMAT))
            root.addHandler(extra)
        except OSError as exc:
            root.warning("cannot open log file %s: %s", log_file, exc)

    for name in _THIRD_PARTY_WARNING_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)

    _configured_processes.add(process_name)
    return path


__all__ = ["setup_logging", "log_path"]
