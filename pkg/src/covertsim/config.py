"""Settings for covertsim runs: defaults, config files and the environment.

Config files are flat ``key = value`` text with the same keys as the
command-line flags (``p-ac`` and ``p_ac`` are the same key).  The default
file lives at:

    $XDG_CONFIG_HOME/covertsim/default.toml
      (falls back to ~/.config/covertsim/default.toml)

and is read when it exists and no ``--config`` is given.  A bare name
(no path separators) is looked up as ``<name>.toml`` in the same directory.

Precedence: built-in defaults < config file < command-line flags.
"""

from __future__ import annotations

import logging
import os
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - backport with the identical API
    import tomli as tomllib
from pathlib import Path
from typing import Any

import tomli_w
from pydantic import BaseModel, ConfigDict, ValidationError

from .models import (
    ExperimentConfig,
    GridSpec,
    Hypothesis,
    McConfig,
    ParameterError,
    Receiver,
    SweepSpec,
    SystemParams,
    db_to_linear,
)

logger = logging.getLogger(__name__)

WORKERS_ENV = "COVERTSIM_WORKERS"

# ---------------------------------------------------------------------------
# XDG helpers
# ---------------------------------------------------------------------------


def _xdg_config_home() -> Path:
    """Return the XDG config home directory, defaulting to ~/.config."""
    xdg = os.environ.get("XDG_CONFIG_HOME", "")
    if xdg:
        return Path(xdg)
    return Path.home() / ".config"


def config_dir(create: bool = True) -> Path:
    d = _xdg_config_home() / "covertsim"
    if create:
        d.mkdir(parents=True, exist_ok=True)
    return d


def default_config_path() -> Path:
    return config_dir(create=False) / "default.toml"


def resolve_config_path(path_or_name: str | None) -> Path:
    """Resolve a config specifier to a Path.

    1. ``None``  →  default.toml in the XDG dir.
    2. Existing file path  →  use directly.
    3. Bare name  →  <name>.toml in the XDG dir.
    4. Anything else  →  a literal path (may not exist yet).
    """
    if path_or_name is None:
        return default_config_path()

    candidate = Path(path_or_name).expanduser()
    if candidate.is_file():
        return candidate.resolve()

    if os.sep not in path_or_name and "/" not in path_or_name and not candidate.suffix:
        return config_dir(create=False) / f"{path_or_name}.toml"

    return candidate.resolve()


# ---------------------------------------------------------------------------
# Settings schema
# ---------------------------------------------------------------------------


class Settings(BaseModel):
    """Every tunable a run accepts, keyed like the CLI flags."""

    model_config = ConfigDict(extra="forbid")

    p_ac: float = 500.0
    p_ab: float = 100.0
    p_total_db: float = 30.0
    d_ac: float = 5.0
    d_ab: float = 5.0
    d_aw: float = 5.0
    alpha: float = 3.0
    sigma2_c: float = 1.0
    sigma2_b: float = 1.0
    sigma2_w: float = 1.0
    beta: float = 0.2
    beta_c: float | None = None
    beta_b: float | None = None
    beta_w: float | None = None
    eps: float = 0.2
    delta_c: float = 0.1
    delta_b: float = 0.1
    rate_c: float = 1.0
    rate_b: float = 0.1
    g_hat: float = 0.0
    receiver: Receiver = Receiver.CAROL
    hypothesis: Hypothesis = Hypothesis.H1
    grid_size: int = 200
    sweep: str | None = None
    grid: str | None = None
    trials: int = 100_000
    n_uses: int | None = None
    seed: int = 0
    workers: int | None = None
    out: str = "-"

    def to_params(self) -> SystemParams:
        return SystemParams(
            p_ac=self.p_ac,
            p_ab=self.p_ab,
            d_ac=self.d_ac,
            d_ab=self.d_ab,
            d_aw=self.d_aw,
            alpha=self.alpha,
            sigma2_c=self.sigma2_c,
            sigma2_b=self.sigma2_b,
            sigma2_w=self.sigma2_w,
            beta_c=self.beta if self.beta_c is None else self.beta_c,
            beta_b=self.beta if self.beta_b is None else self.beta_b,
            beta_w=self.beta if self.beta_w is None else self.beta_w,
            epsilon=self.eps,
            p_total=db_to_linear(self.p_total_db),
        )

    def effective_workers(self) -> int:
        return self.workers if self.workers is not None else env_workers()

    def to_mc(self) -> McConfig:
        return McConfig(trials=self.trials, n_uses=self.n_uses, seed=self.seed, workers=self.effective_workers())

    def to_experiment(self, command: str) -> ExperimentConfig:
        return ExperimentConfig(
            command=command,
            params=self.to_params(),
            sweep=SweepSpec.parse(self.sweep) if self.sweep else None,
            output_path=self.out,
            mc=self.to_mc(),
            grid=GridSpec.parse(self.grid) if self.grid else None,
            grid_size=self.grid_size,
            delta_c=self.delta_c,
            delta_b=self.delta_b,
            receiver=self.receiver,
            hypothesis=self.hypothesis,
            g_hat=self.g_hat,
            rate_c=self.rate_c,
            rate_b=self.rate_b,
            workers=self.effective_workers(),
        )


def _normalize_keys(data: dict[str, Any]) -> dict[str, Any]:
    return {str(key).strip().replace("-", "_"): value for key, value in data.items()}


def _schema_errors(exc: ValidationError, source: str) -> ParameterError:
    messages = []
    for err in exc.errors():
        where = ".".join(str(part) for part in err["loc"]) or "<root>"
        messages.append(f"{where}: {err['msg']} ({source})")
    return ParameterError(messages)


def env_workers() -> int:
    """Default worker count from ``COVERTSIM_WORKERS``, else 1."""
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        logger.warning("ignoring %s=%r: not an integer", WORKERS_ENV, raw)
        return 1
    if value < 1:
        logger.warning("ignoring %s=%r: must be >= 1", WORKERS_ENV, raw)
        return 1
    return value


# ---------------------------------------------------------------------------
# Read / write
# ---------------------------------------------------------------------------


def load_config_file(path_or_name: str | None = None) -> dict[str, Any]:
    """Read and schema-check a config file; returns only the keys it sets.

    With ``None`` the XDG default file is read if present (else ``{}``).  An
    explicitly named file that does not exist is an error.
    """
    path = resolve_config_path(path_or_name)
    if not path.exists():
        if path_or_name is None:
            return {}
        raise ParameterError([f"config: file not found: {path}"])

    try:
        data = _normalize_keys(tomllib.loads(path.read_text(encoding="utf-8")))
    except (OSError, UnicodeDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ParameterError([f"config: cannot parse {path}: {exc}"]) from exc

    try:
        Settings.model_validate(data)
    except ValidationError as exc:
        raise _schema_errors(exc, str(path)) from None
    logger.debug("loaded %d settings from %s", len(data), path)
    return data


def build_settings(file_values: dict[str, Any], overrides: dict[str, Any]) -> Settings:
    """Merge config-file values and flag overrides (``None`` = not given).

    A ``beta`` flag sets all three uncertainties, so it also clears any
    per-receiver ``beta_*`` that came from the file.
    """
    merged = dict(file_values)
    given = {key: value for key, value in _normalize_keys(overrides).items() if value is not None}
    if "beta" in given:
        for key in ("beta_c", "beta_b", "beta_w"):
            merged.pop(key, None)
    merged.update(given)
    try:
        return Settings.model_validate(merged)
    except ValidationError as exc:
        raise _schema_errors(exc, "settings") from None


def save_config(settings: Settings, path: Path | str) -> Path:
    """Write *settings* as a flat TOML file; parent dirs are created."""
    dest = Path(path).expanduser().resolve()
    dest.parent.mkdir(parents=True, exist_ok=True)
    data = settings.model_dump(mode="json", exclude_none=True)
    dest.write_bytes(tomli_w.dumps(data).encode("utf-8"))
    return dest


__all__ = [
    "Settings",
    "WORKERS_ENV",
    "build_settings",
    "config_dir",
    "default_config_path",
    "env_workers",
    "load_config_file",
    "resolve_config_path",
    "save_config",
]
