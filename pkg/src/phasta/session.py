"""The stepping owner of one running network.

A Session owns all mutable state: the state vector, the modulation inputs,
the noise stream and the pending command queue.  Commands arriving between
ticks are applied together at the next tick boundary, before the derivative
is evaluated, so a cue or modulation change always takes effect within one
integration step.  Everything else in the library is pure functions.
"""

import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import observables
from .blending import blend
from .dynamics import NoiseSource, SystemConfig, step
from .errors import PhastaError
from .modulation import (
    ModulationInputs, apply_transition_edit, build_greediness, resolve_bias, speed_factor,
)

log = logging.getLogger("phasta.session")


@dataclass
class GoalSet:
    """Motion goals and primitives attached to a state graph."""

    dimension: int
    goals: dict
    primitives: dict
    mode: str = "moment"


@dataclass
class Tick:
    """One evaluated trajectory point (arrays are live numpy views)."""

    tick: int
    t: float
    x: np.ndarray
    dominant: int
    Lambda: np.ndarray
    Phi: np.ndarray
    phi_valid: np.ndarray
    eta: float
    delta_dot: np.ndarray
    g: np.ndarray
    cue: str = None
    command: object = None


class Session:
    """Single-writer simulation session: one logical owner advances the state."""

    def __init__(self, cfg: SystemConfig, inputs: ModulationInputs = None,
                 goals: GoalSet = None, policy=None, seed=0, initial_state=0,
                 state_names=None):
        self.cfg = cfg
        self._cfg0 = cfg
        self.goals = goals
        self.policy = policy
        self.state_names = list(state_names) if state_names else [f"s{i}" for i in range(cfg.n)]
        self.seed = int(seed)
        self.initial_index = int(initial_state)
        self._baseline = (inputs or ModulationInputs.neutral(cfg.n)).validate()
        self.pending = deque()
        self.paused = False
        self.reset(seed)

    # -- command handling ---------------------------------------------------

    def submit(self, msg):
        """Queue a command; it is applied at the next tick boundary."""
        self.pending.append(msg)

    def apply(self, msg):
        """Apply one command immediately; returns an error string or None."""
        kind = msg.get("type")
        try:
            if kind == "set_greediness":
                self.inputs.g = np.asarray(msg["g"], dtype=float)
                self.inputs.validate()
                self._G = build_greediness(self.inputs.g, self.cfg.T).G
            elif kind == "set_bias":
                self.inputs.B = self._matrix_from(msg)
                self.inputs.validate()
            elif kind == "set_speed":
                self.inputs.A = self._matrix_from(msg)
                self.inputs.validate()
            elif kind == "set_bias_offset":
                v = msg["value"]
                self.inputs.bias_offset = (np.full(self.cfg.n, float(v))
                                           if np.isscalar(v) else np.asarray(v, dtype=float))
            elif kind == "set_epsilon":
                self.noise.epsilon = float(msg["value"])
            elif kind == "set_transitions":
                T_new = self._matrix_from(msg)
                self.cfg = apply_transition_edit(self.cfg, T_new)
                self._G = build_greediness(self.inputs.g, self.cfg.T).G
            elif kind == "cue":
                value = msg["value"]
                self.active_cue = value
                if self.policy is not None:
                    self.inputs = self.policy.apply(value, self._baseline)
                    self._G = build_greediness(self.inputs.g, self.cfg.T).G
            elif kind == "pause":
                self.paused = True
            elif kind == "resume":
                self.paused = False
            elif kind == "reset":
                self.reset(msg.get("seed", self.seed))
            else:
                return f"unknown message type {kind!r}"
        except (PhastaError, KeyError, TypeError, ValueError) as exc:
            return f"rejected {kind}: {exc}"
        return None

    def _matrix_from(self, msg):
        if "entries" in msg:
            m = np.zeros((self.cfg.n, self.cfg.n))
            for frm, to, val in msg["entries"]:
                m[self._index(to), self._index(frm)] = float(val)
            return m
        key = next(k for k in ("B", "A", "T", "matrix") if k in msg)
        return np.asarray(msg[key], dtype=float)

    def _index(self, name):
        if isinstance(name, str):
            return self.state_names.index(name)
        return int(name)

    def reset(self, seed=None):
        """Reinitialize state, time, noise stream, topology and inputs from the baseline."""
        if seed is not None:
            self.seed = int(seed)
        self.cfg = self._cfg0
        self.inputs = ModulationInputs(
            B=self._baseline.B.copy(), A=self._baseline.A.copy(),
            g=self._baseline.g.copy(), epsilon=self._baseline.epsilon,
            bias_offset=None if self._baseline.bias_offset is None
            else self._baseline.bias_offset.copy())
        self.noise = NoiseSource(self.inputs.epsilon, self.seed)
        self.state = self.cfg.initial_state(self.initial_index)
        self.tick_index = 0
        self.active_cue = None
        self._G = build_greediness(self.inputs.g, self.cfg.T).G

    # -- stepping -----------------------------------------------------------

    def step_once(self):
        """Apply pending commands, evaluate observables at the current state,
        advance one integration step, and return the evaluated Tick."""
        errors = []
        while self.pending:
            err = self.apply(self.pending.popleft())
            if err:
                errors.append(err)
                log.warning("command rejected: %s", err)
        x = self.state.x
        t = self.state.t
        lam_t = observables.transition_activations(x, self.cfg.T)
        lam_s = observables.state_activations(x, lam_t)
        Lambda = observables.combine(lam_t, lam_s)
        Phi, phi_valid = observables.phases(x)
        eta = speed_factor(Lambda, self.inputs.A)
        delta_dot = resolve_bias(Lambda, self.inputs.B, x)
        if self.inputs.bias_offset is not None:
            delta_dot = delta_dot + self.inputs.bias_offset
        command = None
        if self.goals is not None:
            command = blend(Lambda, Phi, self.goals.goals, self.goals.primitives,
                            mode=self.goals.mode)
        tick = Tick(tick=self.tick_index, t=t, x=x, dominant=int(np.argmax(x)),
                    Lambda=Lambda, Phi=Phi, phi_valid=phi_valid, eta=eta,
                    delta_dot=delta_dot, g=self.inputs.g.copy(),
                    cue=self.active_cue, command=command)
        self.state = step(self.state, self.cfg, G=self._G, eta=eta,
                          delta_dot=delta_dot, noise=self.noise)
        self.tick_index += 1
        return tick

    def run(self, duration, schedule=None, collect=True):
        """Step for a simulated duration; schedule is a sorted list of
        (time, command) pairs applied at the first tick at or after each time."""
        schedule = list(schedule or [])
        k = 0
        out = []
        steps = int(round(duration / self.cfg.dt))
        for _ in range(steps):
            while k < len(schedule) and self.state.t >= schedule[k][0] - 1e-12:
                self.submit(schedule[k][1])
                k += 1
            tick = self.step_once()
            if collect:
                out.append(tick)
        return out
