"""covertsim — covert communication over block-fading channels.

Closed-form analysis of a warden's radiometer under channel-estimation
uncertainty, receiver outage probabilities, the covertness-constrained
rate region, and a Monte Carlo oracle that checks all of them.

Example::

    from covertsim import SystemParams, average_detection_error, region_boundary

    params = SystemParams.from_db(30.0, p_ac=500.0, p_ab=20.0)
    error = average_detection_error(params)
    points = region_boundary(params, grid_size=50)
"""

import importlib.metadata

from .detection import (
    QuadratureError,
    average_detection_error,
    conditional_error_at_optimum,
    covertness_level,
    error_sum,
    lambda_dagger,
    optimal_threshold,
    p_fa,
    p_md,
)
from .models import (
    DegenerateHypothesisError,
    Hypothesis,
    McConfig,
    NumericalError,
    OutageSpec,
    ParameterError,
    Receiver,
    RegionPoint,
    SystemParams,
    WillieChannelView,
    derive_willie_view,
    validate,
)
from .montecarlo import empirical_average_error, empirical_error_sum, empirical_outage, sample_channel
from .outage import max_rate, outage, outage_bob_h1, outage_carol_h0, outage_carol_h1
from .region import MonotonicityError, max_covert_power, no_covert_baseline, pareto_frontier, region_boundary

try:
    __version__ = importlib.metadata.version("covertsim")
except importlib.metadata.PackageNotFoundError:
    __version__ = "0.1.0"

__all__ = [
    # Scenario
    "SystemParams",
    "WillieChannelView",
    "OutageSpec",
    "McConfig",
    "RegionPoint",
    "Receiver",
    "Hypothesis",
    "validate",
    "derive_willie_view",
    # Errors
    "ParameterError",
    "DegenerateHypothesisError",
    "NumericalError",
    "QuadratureError",
    "MonotonicityError",
    # Detection
    "lambda_dagger",
    "p_fa",
    "p_md",
    "error_sum",
    "optimal_threshold",
    "conditional_error_at_optimum",
    "average_detection_error",
    "covertness_level",
    # Outage
    "outage",
    "outage_carol_h1",
    "outage_carol_h0",
    "outage_bob_h1",
    "max_rate",
    # Region
    "max_covert_power",
    "region_boundary",
    "no_covert_baseline",
    "pareto_frontier",
    # Monte Carlo
    "sample_channel",
    "empirical_error_sum",
    "empirical_outage",
    "empirical_average_error",
    # Package metadata
    "__version__",
]
