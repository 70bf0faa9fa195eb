"""Pytest configuration and shared fixtures."""

# Ensure the src directory is in the path
import os
import sys
from pathlib import Path

import numpy as np
import pytest

SRC_DIR = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(SRC_DIR))

from covertsim.models import SystemParams  # noqa: E402


@pytest.fixture
def base_params() -> SystemParams:
    """Numerical setup used throughout: σ²=1, 30 dB, α=3, d=5, β=0.2, ε=0.2."""
    return SystemParams.from_db(30.0, p_ac=500.0, p_ab=100.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def _draw_params(rng: np.random.Generator, **overrides: float) -> SystemParams:
    """A random valid scenario with p_ab > 0."""
    p_total = float(rng.uniform(100.0, 5000.0))
    p_ac = float(rng.uniform(0.05, 0.9)) * p_total
    values = {
        "p_total": p_total,
        "p_ac": p_ac,
        "p_ab": float(rng.uniform(0.01, 1.0)) * (p_total - p_ac),
        "d_ac": float(rng.uniform(1.0, 10.0)),
        "d_ab": float(rng.uniform(1.0, 10.0)),
        "d_aw": float(rng.uniform(1.0, 10.0)),
        "alpha": float(rng.uniform(2.0, 4.0)),
        "sigma2_c": float(rng.uniform(0.1, 5.0)),
        "sigma2_b": float(rng.uniform(0.1, 5.0)),
        "sigma2_w": float(rng.uniform(0.1, 5.0)),
        "beta_c": float(rng.uniform(0.05, 0.95)),
        "beta_b": float(rng.uniform(0.05, 0.95)),
        "beta_w": float(rng.uniform(0.05, 0.95)),
        "epsilon": float(rng.uniform(0.01, 0.5)),
    }
    values.update(overrides)
    return SystemParams(**values)


@pytest.fixture
def draw_params():
    """``draw_params(rng, **overrides)`` -> random valid SystemParams."""
    return _draw_params


@pytest.fixture
def cli_env(tmp_path) -> dict[str, str]:
    """Environment for ``python -m covertsim`` subprocesses: src on the path,
    config and logs under a throwaway XDG dir."""
    env = dict(os.environ)
    env["PYTHONPATH"] = os.pathsep.join(filter(None, [str(SRC_DIR), env.get("PYTHONPATH", "")]))
    env["XDG_CONFIG_HOME"] = str(tmp_path / "xdg")
    env.pop("COVERTSIM_WORKERS", None)
    return env
