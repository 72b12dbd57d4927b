"""Built-in experiment presets reproduced as data traces.

Each preset returns a PresetRun holding one or more variants (label ->
ticks) plus the event log; `check()` re-derives the headline property of
the corresponding experiment and raises AssertionError when it does not
hold.  The CLI writes each variant as an NDJSON trace with a rendered
figure next to it.
"""

from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .config import config_from_dict
from .dynamics import SystemConfig, cycle_matrix, fork_matrix
from .modulation import ModulationInputs
from .scenario import run_handover
from .session import Session

ALPHA0 = 10.0
UNIFORM_BIAS = 5e-5


@dataclass
class PresetRun:
    name: str
    state_names: list
    variants: dict
    events: dict = field(default_factory=dict)
    measurements: dict = field(default_factory=dict)
    decimation: int = 20
    dt: float = 1e-3


def _cycle_session(dt=1e-3, A=None, seed=0):
    cfg = SystemConfig.canonical(cycle_matrix(3), alpha0=ALPHA0, dt=dt)
    inputs = ModulationInputs.neutral(3)
    inputs.bias_offset = np.full(3, UNIFORM_BIAS)
    if A is not None:
        inputs.A = np.asarray(A, dtype=float)
    return Session(cfg, inputs, seed=seed, state_names=["s1", "s2", "s3"])


def _fork_session(b1, b2, epsilon=0.0, seed=0, dt=1e-3):
    cfg = SystemConfig.canonical(fork_matrix(), alpha0=ALPHA0, dt=dt)
    inputs = ModulationInputs.neutral(3)
    inputs.B[1, 0] = b1
    inputs.B[2, 0] = b2
    inputs.bias_offset = np.full(3, UNIFORM_BIAS)
    inputs.epsilon = epsilon
    return Session(cfg, inputs, seed=seed, state_names=["s0", "s1", "s2"])


def _run_with_switch(session, g_new, duration, j=1, i=0, phi_lo=0.3, phi_hi=0.6):
    """Run until transition i->j is mid-phase, switch greediness, continue."""
    ticks = []
    switch_t = None
    steps = int(round(duration / session.cfg.dt))
    for _ in range(steps):
        tick = session.step_once()
        ticks.append(tick)
        if switch_t is None and tick.Lambda[j, i] > 0.5 and phi_lo <= tick.Phi[j, i] <= phi_hi:
            session.submit({"type": "set_greediness", "g": list(g_new)})
            switch_t = tick.t
    return ticks, switch_t


def fig1():
    """Canonical three-state cycle: the attractor trajectory itself."""
    session = _cycle_session()
    ticks = session.run(8.0)
    run = PresetRun("fig1", session.state_names, {"cycle": ticks})

    def check():
        norms = np.array([np.linalg.norm(t.x) for t in ticks])
        assert norms.min() > 0.5 and norms.max() < 1.5
        assert len(set(analysis.dominant_sequence(ticks))) == 3
    run.check = check
    return run


def fig3(duration=20.0, seed=0):
    """Activations and phases of the 3-state cycle under a uniform bias."""
    session = _cycle_session(seed=seed)
    ticks = session.run(duration)
    run = PresetRun("fig3", session.state_names, {"cycle": ticks})

    def check():
        seq = analysis.dominant_sequence(ticks)
        assert len(seq) >= 10, f"only {len(seq)} dominant states in {duration}s"
        for k in range(len(seq) - 1):
            assert seq[k + 1] == (seq[k] + 1) % 3, f"broken cycle order {seq}"
        for j, i in ((1, 0), (2, 1), (0, 2)):
            pulses = analysis.activation_pulses(ticks, j, i)
            interior = pulses[1:-1] if len(pulses) > 2 else pulses
            assert all(p[2] > 0.95 for p in interior), f"weak pulse on {i}->{j}"
            for _, _, _, phi_min, phi_max, monotone in interior:
                assert phi_min < 0.1 and phi_max > 0.9 and monotone
    run.check = check
    return run


def fig4(seeds=(0, 1, 2, 3, 4), epsilon=1e-6, duration=8.0):
    """Decisiveness: 55:45 biased fork resolved under g=1 vs g=8."""
    b = 0.02
    variants = {}
    extinction = {"g1": [], "g8": []}
    for label, g in (("g1", 1.0), ("g8", 8.0)):
        for seed in seeds:
            session = _fork_session(0.55 * b, 0.45 * b, epsilon=epsilon, seed=seed)
            session.apply({"type": "set_greediness", "g": [g, g, g]})
            ticks = session.run(duration)
            final = ticks[-1].dominant
            loser = 2 if final == 1 else 1
            extinction[label].append(analysis.extinction_time(ticks, loser, 0))
            if seed == seeds[0]:
                variants[label] = ticks
    run = PresetRun("fig4", ["s0", "s1", "s2"], variants,
                    measurements={"extinction": extinction})

    def check():
        for e1, e8 in zip(extinction["g1"], extinction["g8"]):
            assert e8 < e1, f"g=8 not more decisive: {extinction}"
    run.check = check
    return run


def fig5(dt=2e-4, duration=24.0):
    """Transition speed scaling over three orders of magnitude."""
    A = np.zeros((3, 3))
    A[1, 0] = -5.0   # s1 -> s2 slowed 32x
    A[2, 1] = 0.0
    A[0, 2] = +5.0   # s3 -> s1 sped up 32x
    session = _cycle_session(dt=dt, A=A)
    ticks = session.run(duration)
    durations = {}
    for label, (j, i) in (("slow", (1, 0)), ("normal", (2, 1)), ("fast", (0, 2))):
        got = analysis.transition_traversals(ticks, j, i)
        assert got, f"no completed traversal for {label}"
        durations[label] = got[0]
    run = PresetRun("fig5", session.state_names, {"speed": ticks},
                    measurements={"durations": durations}, dt=dt, decimation=100)

    def check():
        r1 = durations["slow"] / durations["normal"]
        r2 = durations["normal"] / durations["fast"]
        assert 0.8 * 32 <= r1 <= 1.25 * 32, f"slow/normal ratio {r1:.1f}"
        assert 0.8 * 32 <= r2 <= 1.25 * 32, f"normal/fast ratio {r2:.1f}"
    run.check = check
    return run


def fig6(duration=6.0):
    """Halt, reversal and balanced reversal of an ongoing fork transition."""
    b = 0.02
    variants = {}
    events = {}
    measurements = {}
    for label, g in (("halt", (1, 0, 0)), ("reverse", (1, -1, -1)),
                     ("reverse_balanced", (1, -2, -2))):
        session = _fork_session(b, 0.0)
        ticks, switch_t = _run_with_switch(session, g, duration)
        variants[label] = ticks
        events[label] = [(switch_t, f"g={list(g)}")]
        ts = analysis.series(ticks, lambda t: t.t)
        phi = analysis.series(ticks, lambda t: t.Phi[1, 0])
        lam0 = analysis.series(ticks, lambda t: t.Lambda[0, 0])
        k = int(np.searchsorted(ts, switch_t))
        k1 = int(np.searchsorted(ts, switch_t + 1.0))
        measurements[label] = {
            "switch_t": switch_t,
            "phase_drift_1s": float(abs(phi[k1] - phi[k])),
            "predecessor_peak": float(lam0[k:].max()),
        }
    run = PresetRun("fig6", ["s0", "s1", "s2"], variants, events=events,
                    measurements=measurements)

    def check():
        assert measurements["halt"]["phase_drift_1s"] < 0.01
        assert measurements["reverse"]["predecessor_peak"] > 0.99
        assert measurements["reverse_balanced"]["predecessor_peak"] > 0.99
    run.check = check
    return run


def fig7(duration=10.0, window=0.2):
    """Reconsideration: a run committed toward s1 is redirected to s2."""
    b = 0.02
    patterns = {"reluctant": (0, 0, 1), "gradual": (0, 0.5, 2), "backtrack": (0, -1, 20)}
    variants = {}
    events = {}
    measurements = {}
    for label, g in patterns.items():
        session = _fork_session(0.6 * b, 0.4 * b)
        ticks, switch_t = _run_with_switch(session, g, duration)
        variants[label] = ticks
        events[label] = [(switch_t, f"g={list(g)}")]
        ts = analysis.series(ticks, lambda t: t.t)
        phi_lose = analysis.series(ticks, lambda t: t.Phi[1, 0])
        lam2 = analysis.series(ticks, lambda t: t.Lambda[2, 2])
        k = int(np.searchsorted(ts, switch_t))
        k1 = int(np.searchsorted(ts, switch_t + window))
        measurements[label] = {
            "switch_t": switch_t,
            "final_winner_activation": float(lam2[-1]),
            "losing_phase_drop": float(phi_lose[k1] - phi_lose[k]),
        }
    run = PresetRun("fig7", ["s0", "s1", "s2"], variants, events=events,
                    measurements=measurements)

    def check():
        for label, m in measurements.items():
            assert m["final_winner_activation"] > 0.99, f"{label} did not flip: {m}"
        drops = {label: m["losing_phase_drop"] for label, m in measurements.items()}
        assert drops["backtrack"] < min(drops["reluctant"], drops["gradual"]), drops
    run.check = check
    return run


def fig8(duration=12.0):
    """Greediness change on a running cycle: g -> [1, 5, 0] freezes the
    machine at the transition into the slighted state."""
    session = _cycle_session()
    switch_t = 4.0
    ticks = session.run(duration, schedule=[(switch_t, {"type": "set_greediness",
                                                        "g": [1.0, 5.0, 0.0]})])
    run = PresetRun("fig8", session.state_names, {"cycle": ticks},
                    events={"cycle": [(switch_t, "g=[1,5,0]")]})

    def check():
        lam22 = analysis.series(ticks, lambda t: t.Lambda[2, 2])
        ts = analysis.series(ticks, lambda t: t.t)
        after = ts > switch_t + 1.0
        assert lam22[after].max() < 0.9   # state s3 never fully reached again
    run.check = check
    return run


def handover_preset():
    """The four scripted handover runs used by the acceptance suite."""
    scripts = {
        "left": ([(1.0, "left_extended")], 8.0),
        "right": ([(1.0, "right_extended")], 8.0),
        "both": ([(1.0, "both_extended")], 8.0),
        "disengaged": ([(1.0, "left_extended"), (5.08, "disengaged")], 9.0),
    }
    variants = {}
    events = {}
    names = None
    for label, (script, duration) in scripts.items():
        trace = run_handover(script, duration=duration)
        variants[label] = trace.ticks
        events[label] = [(t, v) for t, v in trace.cues]
        names = names or trace.dominant_names and None
    from .scenario import HANDOVER_STATES
    run = PresetRun("handover", HANDOVER_STATES, variants, events=events)
    run.check = lambda: None
    return run


PRESETS = {
    "fig1": fig1, "fig3": fig3, "fig4": fig4, "fig5": fig5,
    "fig6": fig6, "fig7": fig7, "fig8": fig8, "handover": handover_preset,
}
