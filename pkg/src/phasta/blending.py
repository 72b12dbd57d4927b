"""Composition of motion: activation-weighted mixing of control goals.

Every state carries a static Gaussian goal over (position, velocity); every
transition carries a phase-parameterized trajectory distribution given as
knots interpolated linearly in mean and covariance.  The combined activation
matrix supplies the mixture weights, the phase matrix supplies the
evaluation point of each active primitive.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryConsistencyError, MissingGoalError, ParameterDomainError

# Slots lighter than this are dropped from the mixture (and the remaining
# weights renormalized); keeps dormant floor-level activations out.
WEIGHT_EPS = 1e-6


@dataclass
class MotionGoal:
    """Static normal distribution over (position, velocity)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.cov = np.asarray(self.cov, dtype=float)
        d = len(self.mean)
        if self.cov.shape != (d, d):
            raise ParameterDomainError(f"covariance shape {self.cov.shape} does not match mean dim {d}")
        if not np.allclose(self.cov, self.cov.T):
            raise ParameterDomainError("covariance must be symmetric")
        try:
            np.linalg.cholesky(self.cov)
        except np.linalg.LinAlgError:
            raise ParameterDomainError("covariance must be positive-definite") from None


@dataclass
class TransitionPrimitive:
    """Phase-indexed trajectory distribution for one transition i->j.

    Knots are (phase, mean, cov) with phases 0 = phi_1 < ... < phi_K = 1;
    between knots, mean and covariance are interpolated linearly (a convex
    combination, so covariances stay positive-definite).  The endpoint knots
    must equal the adjacent state goals, which is what makes blended commands
    continuous when a transition saturates into its successor state.
    """

    phases: np.ndarray
    means: np.ndarray
    covs: np.ndarray

    @classmethod
    def from_knots(cls, knots):
        knots = sorted(knots, key=lambda k: k[0])
        phases = np.array([k[0] for k in knots], dtype=float)
        means = np.stack([np.asarray(k[1], dtype=float) for k in knots])
        covs = np.stack([np.asarray(k[2], dtype=float) for k in knots])
        if len(phases) < 2 or phases[0] != 0.0 or phases[-1] != 1.0:
            raise ParameterDomainError("primitive needs K >= 2 knots spanning phases 0..1")
        if np.any(np.diff(phases) <= 0):
            raise ParameterDomainError("knot phases must be strictly increasing")
        return cls(phases=phases, means=means, covs=covs)

    def check_boundaries(self, start: MotionGoal, end: MotionGoal, tol=1e-6):
        if not (np.allclose(self.means[0], start.mean, atol=tol)
                and np.allclose(self.covs[0], start.cov, atol=tol)):
            raise BoundaryConsistencyError("knot at phase 0 must equal the predecessor goal")
        if not (np.allclose(self.means[-1], end.mean, atol=tol)
                and np.allclose(self.covs[-1], end.cov, atol=tol)):
            raise BoundaryConsistencyError("knot at phase 1 must equal the successor goal")


@dataclass
class BlendedCommand:
    """Mixture command: mean, covariance and the contributing (slot, weight) pairs."""

    mean: np.ndarray
    cov: np.ndarray
    weights: list


def evaluate_primitive(p: TransitionPrimitive, phase: float):
    """Distribution of primitive p at the given phase.

    Phases outside [0, 1] are clamped; returns (mean, cov, clamped_flag).
    """
    clamped = phase < 0.0 or phase > 1.0
    phase = min(max(float(phase), 0.0), 1.0)
    k = int(np.searchsorted(p.phases, phase, side="right") - 1)
    if k >= len(p.phases) - 1:
        return p.means[-1].copy(), p.covs[-1].copy(), clamped
    span = p.phases[k + 1] - p.phases[k]
    w = (phase - p.phases[k]) / span
    mean = (1.0 - w) * p.means[k] + w * p.means[k + 1]
    cov = (1.0 - w) * p.covs[k] + w * p.covs[k + 1]
    return mean, cov, clamped


def blend(Lambda, Phi, goals, primitives, mode="moment"):
    """Mix state goals and transition primitives with the activation weights.

    goals: dict state_index -> MotionGoal; primitives: dict (j, i) ->
    TransitionPrimitive for transition i->j.  Diagonal weights select state
    goals; off-diagonal weights select primitives evaluated at their phase.

    mode "moment" matches the first two moments of the mixture:
        mean = sum w_s mean_s
        cov  = sum w_s (cov_s + mean_s mean_s^T) - mean mean^T
    mode "product" combines precision-weighted (a product of powered
    Gaussians): cov = (sum w_s cov_s^-1)^-1, mean = cov . sum w_s cov_s^-1 mean_s.
    """
    n = Lambda.shape[0]
    slots = []
    for j in range(n):
        for i in range(n):
            w = float(Lambda[j, i])
            if w <= WEIGHT_EPS:
                continue
            if j == i:
                goal = goals.get(i)
                if goal is None:
                    raise MissingGoalError(f"state slot {i} is active (weight {w:.3g}) but has no goal")
                slots.append((("state", i), w, goal.mean, goal.cov))
            else:
                prim = primitives.get((j, i))
                if prim is None:
                    raise MissingGoalError(
                        f"transition slot {i}->{j} is active (weight {w:.3g}) but has no primitive")
                mean, cov, _ = evaluate_primitive(prim, float(Phi[j, i]))
                slots.append((("transition", i, j), w, mean, cov))
    if not slots:
        raise MissingGoalError("no active slot above weight threshold")
    total = sum(s[1] for s in slots)
    weights = [(slot, w / total) for slot, w, _, _ in slots]
    ws = np.array([w for _, w in weights])
    means = np.stack([m for _, _, m, _ in slots])
    covs = np.stack([c for _, _, _, c in slots])
    if mode == "moment":
        mean = ws @ means
        second = np.einsum("s,sab->ab", ws, covs + np.einsum("sa,sb->sab", means, means))
        cov = second - np.outer(mean, mean)
    elif mode == "product":
        precisions = np.stack([np.linalg.inv(c) for c in covs])
        prec = np.einsum("s,sab->ab", ws, precisions)
        cov = np.linalg.inv(prec)
        mean = cov @ np.einsum("s,sab,sb->a", ws, precisions, means)
    else:
        raise ParameterDomainError(f"unknown blend mode {mode!r}")
    cov = 0.5 * (cov + cov.T)
    return BlendedCommand(mean=mean, cov=cov, weights=weights)
