"""Handover interaction: a state graph plus a cue-to-modulation policy.

A robot arm picks an object off a table and hands it to a person who may
extend the left hand, the right hand, both (robot's choice) or turn away
(abort).  Perception is simulated: cues arrive as scripted or interactive
events; a real perception stack would plug in at the Cue seam.
"""

from dataclasses import dataclass

import numpy as np

from .config import config_from_dict
from .errors import ConfigError
from .modulation import ModulationInputs
from .session import Session

HANDOVER_STATES = ["home", "grasp", "lift", "reach_left", "reach_right", "release", "retract"]

HANDOVER_EDGES = [
    ["home", "grasp"], ["grasp", "lift"],
    ["lift", "reach_left"], ["lift", "reach_right"],
    ["reach_left", "release"], ["reach_right", "release"],
    ["release", "retract"], ["retract", "home"],
    # abort edges: an ongoing reachout can be withdrawn without releasing
    ["reach_left", "retract"], ["reach_right", "retract"],
]

CUE_VALUES = ("none", "left_extended", "right_extended", "both_extended", "disengaged")


@dataclass
class Cue:
    """One perceived human signal with its arrival time."""

    value: str
    timestamp: float

    def __post_init__(self):
        if self.value not in CUE_VALUES:
            raise ConfigError(f"unknown cue {self.value!r}, expected one of {CUE_VALUES}")


# Policy constants, tuned once against the qualitative halt/reverse/decisive
# regimes and then frozen as regression baselines (scripts/tune_handover.py).
CHAIN_ADVANCE = 5e-5        # uniform bias offset driving sequential progress
FORK_BASE = 5e-3            # baseline pull toward either reach state
HANDEDNESS = 0.1            # relative left preference breaking exact fork ties
RELEASE_PULL = 0.05         # pull from reach states into release
RETRACT_PIN = -2.0          # pins the abort edge shut during normal operation
ABORT_PULL = 0.5            # pull into retract while disengaged
ABORT_PIN = -2.0            # pins release shut while disengaged
G_HESITANT = 0.5
G_FAVOR = 2.0
G_DISFAVOR = 0.25
G_SWIFT = 8.0
G_ABORT = -2.0


class CuePolicy:
    """Total mapping cue value -> (bias deltas, greediness vector).

    Deltas are applied on top of the session's baseline bias matrix; the
    greediness vector replaces the baseline's.  Built against a concrete
    state graph so entries are indexed, making application idempotent.
    """

    def __init__(self, state_names, actions):
        self.state_names = list(state_names)
        self.actions = actions
        missing = [c for c in CUE_VALUES if c not in actions]
        if missing:
            raise ConfigError(f"cue policy not total, missing {missing}")

    def apply(self, cue_value, baseline: ModulationInputs) -> ModulationInputs:
        if cue_value not in self.actions:
            raise ConfigError(f"unknown cue {cue_value!r}")
        delta_b, g = self.actions[cue_value]
        return ModulationInputs(
            B=baseline.B + delta_b, A=baseline.A.copy(), g=g.copy(),
            epsilon=baseline.epsilon,
            bias_offset=None if baseline.bias_offset is None else baseline.bias_offset.copy(),
        ).validate()

    @classmethod
    def default(cls, state_names=None):
        names = list(state_names or HANDOVER_STATES)
        n = len(names)
        idx = names.index
        lift, rl, rr = idx("lift"), idx("reach_left"), idx("reach_right")
        release, retract = idx("release"), idx("retract")

        def bias(entries):
            b = np.zeros((n, n))
            for frm, to, val in entries:
                b[to, frm] = val
            return b

        def g(**overrides):
            vec = np.ones(n)
            for name, val in overrides.items():
                vec[idx(name)] = val
            return vec

        actions = {
            "none": (bias([]), np.full(n, G_HESITANT)),
            "left_extended": (
                bias([(lift, rl, FORK_BASE * 9), (lift, rr, -FORK_BASE * 9)]),
                g(reach_left=G_FAVOR, reach_right=G_DISFAVOR)),
            "right_extended": (
                bias([(lift, rr, FORK_BASE * 9), (lift, rl, -FORK_BASE * 9)]),
                g(reach_right=G_FAVOR, reach_left=G_DISFAVOR)),
            "both_extended": (bias([]), np.full(n, G_SWIFT)),
            "disengaged": (
                bias([(rl, retract, ABORT_PULL - RETRACT_PIN),
                      (rr, retract, ABORT_PULL - RETRACT_PIN),
                      (rl, release, ABORT_PIN - RELEASE_PULL),
                      (rr, release, ABORT_PIN - RELEASE_PULL)]),
                g(release=G_ABORT, retract=G_FAVOR)),
        }
        return cls(names, actions)


def apply_cue(policy: CuePolicy, cue: Cue, inputs: ModulationInputs) -> ModulationInputs:
    """Modulation for the given cue, built from the baseline `inputs`.

    Idempotent: repeating a cue yields the same result because deltas are
    taken against the baseline, not against previously modified inputs.
    """
    return policy.apply(cue.value, inputs)


def handover_config_dict():
    """Raw config dict of the handover scenario (also shipped as configs/handover.json)."""
    reach_z = 0.50
    goals = {
        "home": [0.30, 0.00, 0.40], "grasp": [0.50, 0.00, 0.15],
        "lift": [0.50, 0.00, 0.45], "reach_left": [0.62, 0.35, reach_z],
        "reach_right": [0.62, -0.35, reach_z], "release": [0.70, 0.00, 0.55],
        "retract": [0.35, 0.00, 0.50],
    }
    state_goals = {
        name: {"mean": pos + [0.0, 0.0, 0.0], "cov_diag": [1e-4] * 3 + [4e-4] * 3}
        for name, pos in goals.items()
    }
    lift_mid = [0.56, 0.18, 0.62]
    return {
        "system": {
            "states": HANDOVER_STATES,
            "transitions": [list(e) for e in HANDOVER_EDGES],
            "alpha0": 10.0, "gamma": 2.0, "dt": 1e-3,
            "initial_state": "home",
        },
        "modulation": {
            "bias": [
                ["lift", "reach_left", FORK_BASE * (1 + HANDEDNESS)],
                ["lift", "reach_right", FORK_BASE * (1 - HANDEDNESS)],
                ["reach_left", "release", RELEASE_PULL],
                ["reach_right", "release", RELEASE_PULL],
                ["reach_left", "retract", RETRACT_PIN],
                ["reach_right", "retract", RETRACT_PIN],
            ],
            "greediness": G_HESITANT,
            "bias_offset": CHAIN_ADVANCE,
            "epsilon": 0.0,
            "seed": 0,
        },
        "goals": {
            "dimension": 6,
            "combination": "moment",
            "states": state_goals,
            "primitives": [
                {"from": "lift", "to": "reach_left",
                 "knots": [{"phase": 0.5, "mean": lift_mid + [0.0, 0.0, 0.0],
                            "cov_diag": [9e-4] * 3 + [9e-4] * 3}]},
                {"from": "lift", "to": "reach_right",
                 "knots": [{"phase": 0.5,
                            "mean": [lift_mid[0], -lift_mid[1], lift_mid[2], 0.0, 0.0, 0.0],
                            "cov_diag": [9e-4] * 3 + [9e-4] * 3}]},
            ],
        },
        "scenario": {"type": "handover"},
        "output": {"decimation": 20},
    }


def handover_runconfig():
    return config_from_dict(handover_config_dict())


@dataclass
class ScenarioTrace:
    """Result of one scripted run: every tick plus the event log."""

    ticks: list
    cues: list
    dominant_names: list

    def dominant_sequence(self):
        seq = []
        for name in self.dominant_names:
            if not seq or seq[-1] != name:
                seq.append(name)
        return seq


def run_handover(script, duration=8.0, seed=0, runcfg=None):
    """Run the handover scenario headless with a scripted cue source.

    script: list of (time, cue_value) pairs, sorted by time.  Each cue is
    delivered through the session's command queue and takes effect at the
    next tick boundary.  Returns the full ScenarioTrace.
    """
    script = sorted(script, key=lambda e: e[0])
    for _, value in script:
        Cue(value, 0.0)  # validates the enum
    runcfg = runcfg or handover_runconfig()
    policy = CuePolicy.default(runcfg.state_names)
    session = runcfg.make_session(seed=seed, policy=policy)
    schedule = [(t, {"type": "cue", "value": v}) for t, v in script]
    ticks = session.run(duration, schedule=schedule)
    names = runcfg.state_names
    return ScenarioTrace(
        ticks=ticks,
        cues=[(t, v) for t, v in script if t <= duration],
        dominant_names=[names[t.dominant] for t in ticks],
    )
