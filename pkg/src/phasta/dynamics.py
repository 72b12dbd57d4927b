"""Stable-heteroclinic-channel network: construction and time integration.

The state x lives on the positive orthant and evolves as

    dx/dt = x o (alpha + (rho_o + rho_delta o (T + G)) . x^gamma) * eta
            + delta_dot + epsilon * dW

where `o` is the elementwise product, T is the binary transition matrix
(T[j,i] = 1 iff transition i->j exists), G a greediness adjustment, eta a
scalar speed factor and delta_dot an additive velocity bias.  Each saddle
sits on its own coordinate axis; transitions are the heteroclinic channels
connecting them.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import NumericalDivergenceError, ParameterDomainError, InvalidTransitionMatrixError

# Saddles are approached asymptotically, so coordinates underflow to zero in
# finite precision.  A small positive floor keeps the bias mechanism able to
# re-seed escapes from a saddle; applied after every integration step.
X_FLOOR = 1e-10


def _as_positive_vector(v, name):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ParameterDomainError(f"{name} must be a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
        raise ParameterDomainError(f"{name} must be strictly positive and finite")
    return v


def validate_transition_matrix(T, n=None):
    """Check that T is a binary matrix with zero diagonal; returns it as float array."""
    T = np.asarray(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise InvalidTransitionMatrixError(f"T must be square, got shape {T.shape}")
    if n is not None and T.shape[0] != n:
        raise InvalidTransitionMatrixError(f"T has shape {T.shape}, expected {(n, n)}")
    if np.any((T != 0.0) & (T != 1.0)):
        raise InvalidTransitionMatrixError("T must be binary (entries 0 or 1)")
    if np.any(np.diag(T) != 0.0):
        raise InvalidTransitionMatrixError("T must have a zero diagonal (no self-transitions)")
    return T


def build_rho(alpha, beta, nu):
    """Construct the interaction matrices (rho_o, rho_delta) from the three
    parameter vectors: growth rates alpha, saddle positions beta and channel
    asymmetries nu.

        rho_o     = [alpha (x) beta^-1] o [I - 1 - alpha (x) alpha^-1]
        rho_delta = (alpha o (1 + nu^-1)) (x) beta^-1

    with (x) the outer product.  rho_o and rho_delta stay fixed when the
    transition matrix T or the greediness matrix G changes.
    """
    alpha = _as_positive_vector(alpha, "alpha")
    beta = _as_positive_vector(beta, "beta")
    nu = _as_positive_vector(nu, "nu")
    if not (len(alpha) == len(beta) == len(nu)):
        raise ParameterDomainError("alpha, beta, nu must have equal length")
    n = len(alpha)
    rho_o = np.outer(alpha, 1.0 / beta) * (np.eye(n) - 1.0 - np.outer(alpha, 1.0 / alpha))
    rho_delta = np.outer(alpha * (1.0 + 1.0 / nu), 1.0 / beta)
    return rho_o, rho_delta


def _frozen(a):
    a = np.asarray(a, dtype=float).copy()
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SystemConfig:
    """Immutable parameter set of one network; build via `make` or `canonical`."""

    n: int
    alpha: np.ndarray
    beta: np.ndarray
    nu: np.ndarray
    gamma: float
    T: np.ndarray
    rho_o: np.ndarray
    rho_delta: np.ndarray
    dt: float
    x_min: float = X_FLOOR

    @classmethod
    def make(cls, alpha, beta, nu, gamma, T, dt, x_min=X_FLOOR):
        alpha = _as_positive_vector(alpha, "alpha")
        beta = _as_positive_vector(beta, "beta")
        nu = _as_positive_vector(nu, "nu")
        n = len(alpha)
        T = validate_transition_matrix(T, n)
        if gamma <= 0:
            raise ParameterDomainError("gamma must be positive")
        if dt <= 0:
            raise ParameterDomainError("dt must be positive")
        rho_o, rho_delta = build_rho(alpha, beta, nu)
        return cls(n=n, alpha=_frozen(alpha), beta=_frozen(beta), nu=_frozen(nu),
                   gamma=float(gamma), T=_frozen(T), rho_o=_frozen(rho_o),
                   rho_delta=_frozen(rho_delta), dt=float(dt), x_min=float(x_min))

    @classmethod
    def canonical(cls, T, alpha0=10.0, gamma=2.0, dt=1e-3, x_min=X_FLOOR):
        """Canonical system: alpha[i] = alpha0, beta[i] = 1, nu[i] = 1."""
        T = np.asarray(T, dtype=float)
        n = T.shape[0]
        ones = np.ones(n)
        return cls.make(alpha0 * ones, ones, ones, gamma, T, dt, x_min)

    def with_transitions(self, T_new):
        """Copy of this config with T replaced; rho_o and rho_delta are untouched."""
        T_new = validate_transition_matrix(T_new, self.n)
        return dataclasses.replace(self, T=_frozen(T_new))

    def initial_state(self, i=0):
        """State resting on saddle i, with all other coordinates at the floor."""
        x = np.full(self.n, self.x_min)
        x[i] = self.beta[i]
        return StateVector(x=x, t=0.0)


@dataclass
class StateVector:
    """Continuous network state x (non-negative) at simulation time t."""

    x: np.ndarray
    t: float


class NoiseSource:
    """Gaussian velocity noise of amplitude epsilon, seeded for reproducibility.

    epsilon = 0 draws nothing, so trajectories are bit-deterministic for a
    fixed seed and input schedule.
    """

    def __init__(self, epsilon=0.0, seed=0):
        if epsilon < 0:
            raise ParameterDomainError("epsilon must be >= 0")
        self.epsilon = float(epsilon)
        self.seed = int(seed)
        self._rng = np.random.default_rng(self.seed)

    def draw(self, n):
        return self._rng.standard_normal(n)


def cycle_matrix(n):
    """Transition matrix of the n-state cycle 1 -> 2 -> ... -> n -> 1."""
    T = np.zeros((n, n))
    for i in range(n):
        T[(i + 1) % n, i] = 1.0
    return T


def fork_matrix():
    """Three states with two competing transitions 0->1 and 0->2."""
    T = np.zeros((3, 3))
    T[1, 0] = 1.0
    T[2, 0] = 1.0
    return T


def interaction_matrix(cfg, G=None):
    """Effective interaction matrix M = rho_o + rho_delta o (T + G)."""
    if G is None:
        return cfg.rho_o + cfg.rho_delta * cfg.T
    return cfg.rho_o + cfg.rho_delta * (cfg.T + G)


def _drift(x, cfg, m, eta, delta_dot):
    # x^gamma evaluated as |x|^gamma: identical on the positive orthant where
    # the dynamics live, but safe for integrator-internal stage values.
    xg = np.abs(x) ** cfg.gamma
    out = x * (cfg.alpha + m @ xg) * eta
    if delta_dot is not None:
        out = out + delta_dot
    return out


def derivative(x, cfg, G=None, eta=1.0, delta_dot=None):
    """Right-hand side of the network differential equation.

    Exact algebraic evaluation; no clamping, no noise (the integrator owns
    both).  eta scales only the Lotka-Volterra term, not the additive bias.
    """
    x = np.asarray(x, dtype=float)
    return _drift(x, cfg, interaction_matrix(cfg, G), eta, delta_dot)


def step(state, cfg, G=None, eta=1.0, delta_dot=None, noise=None):
    """Advance the state by one step of cfg.dt.

    Deterministic runs (epsilon = 0) use the classical fixed-step 4th-order
    Runge-Kutta scheme; with epsilon > 0 an Euler-Maruyama step is taken with
    the noise term scaled by sqrt(dt).  Afterwards every component is clamped
    to the floor cfg.x_min.
    """
    x = state.x
    h = cfg.dt
    m = interaction_matrix(cfg, G)
    # overflow/invalid intermediates are caught below as a divergence error
    with np.errstate(over="ignore", invalid="ignore"):
        if noise is None or noise.epsilon == 0.0:
            k1 = _drift(x, cfg, m, eta, delta_dot)
            k2 = _drift(x + 0.5 * h * k1, cfg, m, eta, delta_dot)
            k3 = _drift(x + 0.5 * h * k2, cfg, m, eta, delta_dot)
            k4 = _drift(x + h * k3, cfg, m, eta, delta_dot)
            x_new = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        else:
            x_new = x + h * _drift(x, cfg, m, eta, delta_dot) \
                + noise.epsilon * np.sqrt(h) * noise.draw(cfg.n)
    x_new = np.maximum(x_new, cfg.x_min)
    if not np.all(np.isfinite(x_new)):
        raise NumericalDivergenceError(
            f"non-finite state after step at t={state.t:.6f}", last_state=state)
    return StateVector(x=x_new, t=state.t + h)


def jacobian_at_saddle(cfg, i):
    """Analytic Jacobian of the drift at x = e_i (G = 0, eta = 1, canonical beta = 1).

    For any state j != i the linearized growth rate in direction j is
    alpha[j] + M[j, i]; for an existing transition i->j this equals +alpha[j]
    under canonical parameters, and is strictly negative otherwise.
    """
    if not np.allclose(cfg.beta, 1.0):
        raise ParameterDomainError("jacobian_at_saddle requires canonical beta = 1")
    m = interaction_matrix(cfg)
    J = np.zeros((cfg.n, cfg.n))
    for a in range(cfg.n):
        if a != i:
            J[a, a] = cfg.alpha[a] + m[a, i]
    if cfg.gamma == 1.0:
        J[i, :] += m[i, :]
        J[i, i] += cfg.alpha[i] + m[i, i]
    else:
        # for gamma > 1 the off-axis terms of row i carry a factor x_b^(gamma-1) = 0
        J[i, i] = cfg.alpha[i] + (1.0 + cfg.gamma) * m[i, i]
    return J
