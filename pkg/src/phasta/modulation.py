"""User-facing inputs that modulate the running network.

Bias matrix B selects and times transitions, the speed matrix A scales the
local flow rate exponentially, and the greediness vector g steers how
aggressively competing successor states fight for the trajectory.  All three
are converted here into the quantities the integrator consumes: delta_dot,
eta and G.
"""

from dataclasses import dataclass, field

import numpy as np

from .dynamics import validate_transition_matrix
from .errors import ParameterDomainError

# Sanity bound for speed exponents; |A| = 5 already spans a factor of 32.
A_BOUND = 10.0


@dataclass
class ModulationInputs:
    """Mutable modulation state of one session.

    B[j, i] biases transition i->j (1/s, may be negative to avoid a
    successor); A[j, i] is a log2 speed exponent; g holds one greediness
    value per successor state; bias_offset is a constant velocity added to
    every component (uniform timeout bias); T_edit optionally replaces the
    transition matrix at the next tick.
    """

    B: np.ndarray
    A: np.ndarray
    g: np.ndarray
    epsilon: float = 0.0
    bias_offset: np.ndarray = None
    T_edit: np.ndarray = None

    @classmethod
    def neutral(cls, n):
        return cls(B=np.zeros((n, n)), A=np.zeros((n, n)), g=np.ones(n),
                   epsilon=0.0, bias_offset=np.zeros(n))

    def validate(self):
        if not np.all(np.isfinite(self.B)):
            raise ParameterDomainError("bias matrix B must be finite")
        if np.any(np.abs(self.A) > A_BOUND):
            raise ParameterDomainError(f"speed exponents A must be within [-{A_BOUND}, {A_BOUND}]")
        if not np.all(np.isfinite(self.g)):
            raise ParameterDomainError("greediness vector g must be finite")
        return self


@dataclass
class GreedinessMatrices:
    """Decomposition of the greediness adjustment G.

    G_fwd weakens or reverses the pull of a channel toward its successor
    (0 = nominal, -0.5 = halt, -1 = full reversal); G_comp sets the mutual
    inhibition between successor states competing for the same predecessor.
    """

    G_fwd: np.ndarray
    G_comp: np.ndarray
    G: np.ndarray


def build_greediness(g, T):
    """Construct the greediness adjustment G from the per-state vector g.

    G_fwd[j, i] = clamp((g_j - 1)/2, -1, 0), constant per row: g_j = 1 keeps
    the nominal channel gradient, g_j = 0 cancels it (halt), g_j <= -1
    reverses it.  The clamp at 0 means transitions are never sped up beyond
    the default; larger g only sharpens the competition, encoded as

        G_comp[j, i] = 1.5*(g_i - 1)/2 - 0.5*(g_j - 1)/2

    so that a hungrier competitor i suppresses j harder while a hungrier j
    resists.  Combined:

        G = [T o G_fwd - (T o G_fwd)^T] - [T T^T o (1 - I)] o G_comp

    Competitor pairs that are also directly chained by a transition are
    excluded from the competition term: rivalry must not override an
    existing channel (otherwise high uniform g would sever it).

    g = all-ones yields G = 0 exactly (nominal network behavior).
    """
    g = np.asarray(g, dtype=float)
    n = len(g)
    half = (g - 1.0) / 2.0
    fwd_col = np.clip(half, -1.0, 0.0)
    G_fwd = np.tile(fwd_col[:, None], (1, n))
    G_comp = 1.5 * half[None, :] - 0.5 * half[:, None]
    channel = T * G_fwd
    competitors = (T @ T.T) * (1.0 - np.eye(n)) * (1.0 - T) * (1.0 - T.T)
    G = channel - channel.T - competitors * G_comp
    return GreedinessMatrices(G_fwd=G_fwd, G_comp=G_comp, G=G)


def resolve_bias(Lambda, B, x):
    """Resolved velocity bias delta_dot = (Lambda o B) . x.

    Evaluated on the floored state vector: the floor keeps dormant
    coordinates strictly positive, which is what lets a bias entry bootstrap
    a transition out of an otherwise exact saddle.
    """
    return (Lambda * B) @ np.asarray(x, dtype=float)


def speed_factor(Lambda, A):
    """Scalar speed factor eta = 2 ** sum(Lambda o A).

    A = 0 gives eta = 1 (unmodified behavior); each region of state space is
    scaled by its own exponent, weighted by how active it currently is.
    """
    return float(2.0 ** np.sum(Lambda * A))


def apply_transition_edit(cfg, T_new):
    """Replace the transition matrix of a config at runtime.

    rho_o and rho_delta are untouched; only the channel topology changes.
    """
    validate_transition_matrix(T_new, cfg.n)
    return cfg.with_transitions(T_new)
