"""Algebraic decomposition of the state into activations and phases.

The state space is partitioned into one region per transition and one per
state.  Transition activations live on the planes spanned by predecessor and
successor axes; state activations are the residual, squared for sparseness.
Together they form a weight matrix Lambda whose entries sum to one, directly
usable for blending control goals.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateActivationError, UndefinedActivationError

# Below this, the denominator of a phase entry is considered degenerate and
# the entry is reported as 0 with its validity flag cleared.
PHASE_EPS = 1e-12


def transition_activations(x, T):
    """Activation of every existing transition i->j, from the state vector.

    Lambda[j, i] = 16 |x_j| |x_i| sum(x^2) / ((|x_i|+|x_j|)^4 + (sum|x|)^4),
    masked by T.  Values are in [0, 1], equal 1 exactly at the channel
    midpoint (x_i = x_j, others 0), and are invariant to positive scaling
    of x.  Coordinates enter through absolute values so that small negative
    noise excursions cannot produce negative activations.
    """
    x = np.abs(np.asarray(x, dtype=float))
    l1 = x.sum()
    if l1 <= 0.0:
        raise UndefinedActivationError("activations undefined for the zero vector")
    sq = float(x @ x)
    pair = x[:, None] + x[None, :]
    lam = 16.0 * np.outer(x, x) * sq / (pair ** 4 + l1 ** 4)
    return np.clip(lam, 0.0, 1.0) * T


def state_activations(x, lam_trans):
    """Per-state activation, the residual left by the transition activations.

    The state vector is normalized to unit L2 length first, which makes the
    partition of unity exact off the unit sphere; negative residuals from
    activation overshoot are clamped to zero.
    """
    x = np.abs(np.asarray(x, dtype=float))
    norm = np.linalg.norm(x)
    if norm <= 0.0:
        raise UndefinedActivationError("activations undefined for the zero vector")
    xhat2 = (x / norm) ** 2
    residual = 1.0 - float(lam_trans.sum())
    return np.maximum(xhat2 * residual, 0.0)


def combine(lam_trans, lam_states):
    """Single activation matrix: transitions off-diagonal, states on the diagonal.

    The total is renormalized to sum to exactly one; a raw sum below 1e-6 is
    degenerate and rejected.
    """
    lam = np.array(lam_trans, dtype=float)
    np.fill_diagonal(lam, lam_states)
    total = lam.sum()
    if total < 1e-6:
        raise DegenerateActivationError(f"activation sum {total:.3e} too small to normalize")
    return lam / total


def phases(x):
    """Progress of every possible transition i->j along its channel.

    Phi[j, i] = |x_j| / (|x_i| + |x_j|), in [0, 1].  Returns (Phi, valid);
    entries whose denominator is below 1e-12 are reported as 0 with
    valid[j, i] = False.  A phase is only meaningful while its transition is
    active.  Invariant to positive scaling of x.
    """
    x = np.abs(np.asarray(x, dtype=float))
    denom = x[:, None] + x[None, :]
    valid = denom >= PHASE_EPS
    phi = np.divide(np.tile(x[:, None], (1, len(x))), denom,
                    out=np.zeros((len(x), len(x))), where=valid)
    return phi, valid


@dataclass
class ActivationSnapshot:
    """Combined activations and phases of one trajectory point."""

    Lambda: np.ndarray
    Phi: np.ndarray
    phi_valid: np.ndarray
    t: float


def snapshot(x, T, t=0.0):
    """Evaluate the full observable set for one state vector."""
    lam_t = transition_activations(x, T)
    lam_s = state_activations(x, lam_t)
    phi, valid = phases(x)
    return ActivationSnapshot(Lambda=combine(lam_t, lam_s), Phi=phi, phi_valid=valid, t=t)
