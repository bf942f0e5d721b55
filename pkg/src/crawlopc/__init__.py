"""Two-segment soft crawler: friction-driven dynamics, resonance analysis, optimal gaits."""

from .errors import (
    ConfigError,
    ContractViolationError,
    CrawlerError,
    DegenerateCycleError,
    DivergenceError,
    FrictionDominatesError,
    InvalidParameterError,
    NoPeriodicOrbitError,
    NoZeroCrossingError,
    OpcAbortError,
    OutOfRegimeError,
    ResonantAdjointError,
    StepSizeError,
    UndefinedFrequencyError,
)
from .model import (
    CharacteristicScales,
    DimensionalParams,
    DimensionlessGroups,
    FrictionParams,
    friction_offset,
    nondimensionalize,
    piecewise_friction,
    rhs,
    sigmoid_friction,
    sigmoid_friction_deriv,
)
from .sim import (
    CostBreakdown,
    ForcingSignal,
    SampledForcing,
    SinusoidForcing,
    Trajectory,
    TrajectoryMetrics,
    cost,
    eval_forcing,
    frequency_sweep,
    integrate,
    metrics,
)
from .dfhb import (
    FourierFrictionCoeffs,
    HbSolution,
    friction_fourier_coeffs,
    hb_solve,
    hb_speed_curve,
    optimal_speed,
    speed_bias_ratio,
)
from .pbvp import (
    CostateTrajectory,
    PeriodicStateSolution,
    costate_matrix,
    monodromy,
    solve_costate_periodic,
    solve_state_periodic,
)
from .opc import (
    IterationRecord,
    OpcConfig,
    OpcResult,
    dominant_frequency,
    gradient_direction,
    hill_climb,
)
from .cli import RunConfig, parse_config, run_command, serialize_config

__version__ = "0.1.0"
