"""Dynamic principal-agent contracts for gig work with a reference-dependent worker."""

from ._backend import BACKEND
from .deterministic import (
    DeterministicSolution,
    TrajectoryRow,
    banana_curve,
    steady_profit,
    threshold,
    trajectory,
    value_function,
)
from .dp import GridSpec, PolicyTable, SolverReport, ValueTable, bellman_backup, policy_value_check, solve
from .errors import (
    DomainError,
    GigContractError,
    NoContract,
    NoConvergence,
    ParticipationViolated,
    PolicyRangeError,
    QuadratureError,
)
from .model import (
    Contract,
    ModelParams,
    RoundOutcome,
    WorkerState,
    binding_fix,
    certainty_equivalent,
    drift_check,
    expected_profit_binding,
    expected_utility,
    one_shot_share,
    optimal_effort,
    realize_round,
    reference_update,
    validate_params,
)
from .simulator import EmployerPolicy, Estimate, SimulationConfig, SimulationSummary, simulate

__version__ = "0.1.0"
