"""Incremental distributed LMS with reliability-weighted step sizes.

The package simulates a ring of sensor nodes that cooperatively estimate an
unknown parameter vector. Two algorithms are provided:

* plain incremental LMS (IDLMS), where one estimate circulates through the
  ring and every node applies the same step size;
* a two-phase variant that first estimates every node's observation noise
  variance and then gives noisy nodes smaller step sizes.
"""

from .datagen import (
    ModelParams,
    SampleStream,
    StatisticsOracle,
    assign_node_variances,
    generate_stream,
    solve_normal_equations,
    statistics_oracle,
)
from .errors import ConfigError, ContractError, NumericalError
from .incremental import (
    StepSizeProfile,
    Trajectory,
    lms_node_update,
    run_cycle,
    run_idlms,
)
from .metrics import (
    average_curves,
    convergence_time,
    msd,
    msd_curve,
    steady_state_msd,
)
from .reliability import (
    NoiseEstimate,
    ReliabilityConfig,
    compute_residuals,
    estimate_noise_stats,
    map_step_size,
    run_phase1,
    run_phase2,
    run_proposed,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ContractError",
    "ModelParams",
    "NoiseEstimate",
    "NumericalError",
    "ReliabilityConfig",
    "SampleStream",
    "StatisticsOracle",
    "StepSizeProfile",
    "Trajectory",
    "assign_node_variances",
    "average_curves",
    "compute_residuals",
    "convergence_time",
    "estimate_noise_stats",
    "generate_stream",
    "lms_node_update",
    "map_step_size",
    "msd",
    "msd_curve",
    "run_cycle",
    "run_idlms",
    "run_phase1",
    "run_phase2",
    "run_proposed",
    "solve_normal_equations",
    "statistics_oracle",
    "steady_state_msd",
]
