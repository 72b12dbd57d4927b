"""phasta: a stable-heteroclinic-channel network that acts like a state
machine, with continuous observables (activations, phases), live modulation
(bias, speed, greediness), motion blending and a streaming session service.
"""

from .blending import BlendedCommand, MotionGoal, TransitionPrimitive, blend, evaluate_primitive
from .config import RunConfig, parse_config
from .dynamics import (
    NoiseSource, StateVector, SystemConfig, build_rho, cycle_matrix, derivative,
    fork_matrix, jacobian_at_saddle, step,
)
from .errors import (
    BoundaryConsistencyError, ConfigError, DegenerateActivationError,
    InvalidTransitionMatrixError, MissingGoalError, NumericalDivergenceError,
    ParameterDomainError, PhastaError, UndefinedActivationError,
)
from .modulation import (
    GreedinessMatrices, ModulationInputs, apply_transition_edit, build_greediness,
    resolve_bias, speed_factor,
)
from .observables import (
    ActivationSnapshot, combine, phases, snapshot, state_activations,
    transition_activations,
)
from .scenario import Cue, CuePolicy, apply_cue, run_handover
from .session import GoalSet, Session, Tick

__version__ = "0.1.0"
