"""Scenario parameters and derived quantities shared by every covertsim module.

All powers are linear (the CLI converts dB once at the boundary).  The types
here are frozen dataclasses, so they can be copied into worker processes and
shared freely.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Any

import numpy as np

# Relative slack on the power budget so that p_ac + (p_total - p_ac) passes.
BUDGET_RTOL = 1e-12

MIN_PATH_LOSS_EXPONENT = 2.0


class ParameterError(ValueError):
    """One or more scenario invariants are violated.

    ``errors`` holds one human-readable message per violation, each starting
    with the offending field name.
    """

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class DegenerateHypothesisError(ValueError):
    """ζ1 ≤ ζ0: Willie's two hypotheses produce the same received power."""

    def __init__(self, message: str = "degenerate hypothesis pair"):
        super().__init__(message)


class NumericalError(RuntimeError):
    """Internal numerical failure (quadrature, bisection assumptions)."""


class Receiver(Enum):
    CAROL = "carol"
    BOB = "bob"


class Hypothesis(Enum):
    H0 = "h0"
    H1 = "h1"


class ThresholdBranch(Enum):
    """Which case of the optimal-threshold rule applied."""

    DAGGER = "dagger"
    CLAMP = "clamp"


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class SystemParams:
    p_ac: float = 500.0
    p_ab: float = 100.0
    d_ac: float = 5.0
    d_ab: float = 5.0
    d_aw: float = 5.0
    alpha: float = 3.0
    sigma2_c: float = 1.0
    sigma2_b: float = 1.0
    sigma2_w: float = 1.0
    beta_c: float = 0.2
    beta_b: float = 0.2
    beta_w: float = 0.2
    epsilon: float = 0.2
    p_total: float = 1000.0  # 30 dB

    @classmethod
    def from_db(cls, p_total_db: float, **kwargs: Any) -> "SystemParams":
        return cls(p_total=db_to_linear(p_total_db), **kwargs)

    def with_beta(self, beta: float) -> "SystemParams":
        """Same scenario with β_c = β_b = β_w = *beta*."""
        return replace(self, beta_c=beta, beta_b=beta, beta_w=beta)

    def path_loss(self, receiver: Receiver) -> float:
        """d^α towards *receiver*."""
        d = self.d_ac if receiver is Receiver.CAROL else self.d_ab
        return d**self.alpha

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SystemParams":
        defaults = cls()
        return cls(**{name: float(data.get(name, getattr(defaults, name))) for name in FIELD_NAMES})


FIELD_NAMES: tuple[str, ...] = tuple(SystemParams.__dataclass_fields__)


@dataclass(frozen=True)
class WillieChannelView:
    """Detection-side quantities: ζ0, ζ1, β_w, σ_w² and optionally |ĥ_aw|²."""

    zeta0: float
    zeta1: float
    beta_w: float
    sigma2_w: float
    g_hat: float | None = None

    def with_gain(self, g_hat: float) -> "WillieChannelView":
        if g_hat < 0:
            raise ValueError(f"g_hat must be non-negative, got {g_hat}")
        return replace(self, g_hat=float(g_hat))

    @property
    def ratio_excess(self) -> float:
        """(ζ1 − ζ0)/ζ0, i.e. p_ab/p_ac."""
        return (self.zeta1 - self.zeta0) / self.zeta0


@dataclass(frozen=True)
class DetectionResult:
    lambda_: float
    p_fa: float
    p_md: float
    error_sum: float


@dataclass(frozen=True)
class ThresholdDecision:
    lambda_star: float
    branch: ThresholdBranch
    lambda_dagger: float


@dataclass(frozen=True)
class OutageSpec:
    receiver: Receiver
    rate: float
    hypothesis: Hypothesis = Hypothesis.H1
    delta_cap: float = 0.1

    def __post_init__(self):
        errors = []
        if self.rate < 0 or math.isnan(self.rate):
            errors.append(f"rate must be >= 0, got {self.rate}")
        if not 0.0 < self.delta_cap < 1.0:
            errors.append(f"delta_cap out of open interval (0,1): {self.delta_cap}")
        if self.receiver is Receiver.BOB and self.hypothesis is Hypothesis.H0:
            errors.append("receiver bob has no covert transmission under h0")
        if errors:
            raise ParameterError(errors)

    @property
    def snr_threshold(self) -> float:
        """Δ = 2^R − 1."""
        return math.expm1(self.rate * math.log(2.0))


@dataclass(frozen=True)
class RegionPoint:
    r_c: float
    r_b: float
    p_ac: float
    p_ab: float
    covert_margin: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo run settings; estimates are a pure function of these."""

    trials: int = 100_000
    n_uses: int | None = None  # None = asymptotic (n → ∞) mode
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        errors = []
        if self.trials < 1:
            errors.append(f"trials must be >= 1, got {self.trials}")
        if self.n_uses is not None and self.n_uses < 1:
            errors.append(f"n_uses must be >= 1, got {self.n_uses}")
        if self.workers < 1:
            errors.append(f"workers must be >= 1, got {self.workers}")
        if not 0 <= self.seed < 2**64:
            errors.append(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if errors:
            raise ParameterError(errors)


@dataclass(frozen=True)
class GridSpec:
    """A 1-D evaluation grid: ``lin|log:MIN:MAX:COUNT``."""

    scale: str
    start: float
    stop: float
    count: int

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) != 4:
            raise ParameterError([f"grid '{text}' is not of the form lin|log:MIN:MAX:COUNT"])
        scale, lo, hi, count = parts
        try:
            spec = cls(scale=scale.lower(), start=float(lo), stop=float(hi), count=int(count))
        except ValueError:
            raise ParameterError([f"grid '{text}' has non-numeric bounds or count"]) from None
        spec.check()
        return spec

    def check(self) -> None:
        errors = []
        if self.scale not in ("lin", "log"):
            errors.append(f"grid scale must be lin or log, got {self.scale!r}")
        if self.count < 1:
            errors.append(f"grid count must be >= 1, got {self.count}")
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            errors.append("log grid bounds must be positive")
        if errors:
            raise ParameterError(errors)

    def values(self) -> list[float]:
        if self.scale == "log":
            return [float(v) for v in np.geomspace(self.start, self.stop, self.count)]
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]

    def __str__(self) -> str:
        return f"{self.scale}:{self.start!r}:{self.stop!r}:{self.count}"


# Short names accepted on the command line.
SWEEP_ALIASES: dict[str, str] = {"eps": "epsilon"}


@dataclass(frozen=True)
class SweepSpec:
    """A SystemParams field swept over a grid."""

    name: str
    grid: GridSpec

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        name, sep, rest = text.partition(":")
        name = name.strip().replace("-", "_")
        name = SWEEP_ALIASES.get(name, name)
        if not sep:
            raise ParameterError([f"sweep '{text}' is not of the form NAME:lin|log:MIN:MAX:COUNT"])
        if name not in FIELD_NAMES:
            raise ParameterError([f"sweep parameter {name!r} is not a SystemParams field"])
        return cls(name=name, grid=GridSpec.parse(rest))

    def apply(self, params: SystemParams) -> list[tuple[float, SystemParams]]:
        return [(v, replace(params, **{self.name: v})) for v in self.grid.values()]


COMMANDS: tuple[str, ...] = (
    "threshold",
    "avg-error",
    "outage",
    "region",
    "baseline",
    "error-curve",
    "mc-validate",
)


@dataclass
class ExperimentConfig:
    command: str
    params: SystemParams = field(default_factory=SystemParams)
    sweep: SweepSpec | None = None
    output_path: str = "-"
    mc: McConfig | None = None
    grid: GridSpec | None = None
    grid_size: int = 200
    delta_c: float = 0.1
    delta_b: float = 0.1
    receiver: Receiver = Receiver.CAROL
    hypothesis: Hypothesis = Hypothesis.H1
    g_hat: float = 0.0
    rate_c: float = 1.0
    rate_b: float = 0.1
    workers: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ParameterError([f"command must be one of {', '.join(COMMANDS)}, got {self.command!r}"])


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _open_unit(name: str, value: float, errors: list[str]) -> None:
    if not 0.0 < value < 1.0:
        errors.append(f"{name} out of open interval (0,1): {value}")


def validate(params: SystemParams) -> list[str]:
    """Return every violated SystemParams invariant (empty list when valid)."""
    errors: list[str] = []
    values = params.to_dict()
    for name, value in values.items():
        if not math.isfinite(value):
            errors.append(f"{name} must be finite, got {value}")
    if errors:
        return errors

    if params.p_ac <= 0:
        errors.append(f"p_ac must be > 0, got {params.p_ac}")
    if params.p_ab < 0:
        errors.append(f"p_ab must be >= 0, got {params.p_ab}")
    if params.p_total <= 0:
        errors.append(f"p_total must be > 0, got {params.p_total}")
    if params.p_ac + params.p_ab > params.p_total * (1.0 + BUDGET_RTOL):
        errors.append(
            f"p_total exceeded: p_ac + p_ab = {params.p_ac + params.p_ab} > {params.p_total}"
        )
    for name in ("d_ac", "d_ab", "d_aw"):
        if values[name] <= 0:
            errors.append(f"{name} must be > 0, got {values[name]}")
    if params.alpha < MIN_PATH_LOSS_EXPONENT:
        errors.append(f"alpha below {MIN_PATH_LOSS_EXPONENT:g}: {params.alpha}")
    for name in ("sigma2_c", "sigma2_b", "sigma2_w"):
        if values[name] <= 0:
            errors.append(f"{name} must be > 0, got {values[name]}")
    for name in ("beta_c", "beta_b", "beta_w"):
        _open_unit(name, values[name], errors)
    _open_unit("epsilon", params.epsilon, errors)
    return errors


def require_valid(params: SystemParams) -> SystemParams:
    errors = validate(params)
    if errors:
        raise ParameterError(errors)
    return params


def derive_willie_view(params: SystemParams) -> WillieChannelView:
    """ζ0 = p_ac/d_aw^α and ζ1 = (p_ac + p_ab)/d_aw^α, without a realized gain."""
    if params.p_ab <= 0:
        raise DegenerateHypothesisError()
    loss = params.d_aw**params.alpha
    zeta0 = params.p_ac / loss
    zeta1 = (params.p_ac + params.p_ab) / loss
    if not zeta1 > zeta0:
        raise DegenerateHypothesisError()
    return WillieChannelView(
        zeta0=zeta0,
        zeta1=zeta1,
        beta_w=params.beta_w,
        sigma2_w=params.sigma2_w,
    )
