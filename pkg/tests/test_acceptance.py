"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance is pinned here, nothing is deferred to calibration.
"""

import io

import numpy as np
import pytest

from phasta import analysis, presets
from phasta.blending import blend, evaluate_primitive
from phasta.dynamics import SystemConfig, cycle_matrix, derivative, jacobian_at_saddle
from phasta.observables import combine, phases, state_activations, transition_activations
from phasta.scenario import handover_runconfig, run_handover
from phasta.trace import TraceWriter

A0 = 10.0
DISENGAGE_AT = 5.08          # regression-locked mid reach->release instant
COMMAND_JUMP_BOUND = 0.005   # documented per-step command continuity bound (dt=1e-3)


def ok(line):
    print(f"\n[PASS] {line}")


@pytest.fixture(scope="module")
def fig3_run():
    return presets.fig3()


@pytest.fixture(scope="module")
def fig4_run():
    return presets.fig4()


@pytest.fixture(scope="module")
def fig5_run():
    return presets.fig5()


@pytest.fixture(scope="module")
def fig6_run():
    return presets.fig6()


@pytest.fixture(scope="module")
def fig7_run():
    return presets.fig7()


@pytest.fixture(scope="module")
def handover_runs():
    return {
        "left": run_handover([(1.0, "left_extended")], duration=8.0),
        "right": run_handover([(1.0, "right_extended")], duration=8.0),
        "both": run_handover([(1.0, "both_extended")], duration=8.0),
        "disengaged": run_handover([(1.0, "left_extended"),
                                    (DISENGAGE_AT, "disengaged")], duration=9.0),
    }


def test_fixed_points_and_saddle_structure():
    """Canonical n in {3,5}: zero drift at every saddle, +alpha0 growth toward
    successors, negative otherwise; finite differences agree to 1e-6."""
    for n in (3, 5):
        cfg = SystemConfig.canonical(cycle_matrix(n), alpha0=A0)
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            assert np.max(np.abs(derivative(e, cfg))) <= 1e-12
            J = jacobian_at_saddle(cfg, i)
            J_fd = np.zeros((n, n))
            h = 1e-6
            for b in range(n):
                hi, lo = e.copy(), e.copy()
                hi[b] += h
                lo[b] -= h
                J_fd[:, b] = (derivative(hi, cfg) - derivative(lo, cfg)) / (2 * h)
            np.testing.assert_allclose(J, J_fd, atol=1e-6)
            for j in range(n):
                if j == i:
                    continue
                rate = J[j, j]
                if cfg.T[j, i]:
                    assert rate == pytest.approx(A0, abs=1e-9)
                else:
                    assert rate < 0.0
    ok("fixed points exact to 1e-12; saddle growth +alpha0 toward successors, "
       "negative otherwise; FD Jacobian within 1e-6 (n=3,5)")


def test_fig3_cycle_reproduction(fig3_run):
    """alpha0=10, uniform bias 5e-5: dominant sequence cycles >= 3 times,
    pulses peak > 0.95, phases sweep 0 -> 1 inside their activation window."""
    fig3_run.check()
    seq = analysis.dominant_sequence(fig3_run.variants["cycle"])
    cycles = (len(seq) - 1) // 3
    assert cycles >= 3
    ok(f"three-state cycle: sequence s1,s2,s3 repeated {cycles}x, pulses > 0.95, "
       "phases sweep 0->1 monotonically inside their windows")


def test_partition_of_unity_and_scale_invariance(fig3_run, fig4_run, handover_runs):
    """1000 trajectory points across presets: combined activations sum to
    1 +- 1e-9; activations invariant to scaling by 1e-3..1e3 within 1e-12."""
    pools = [(fig3_run.variants["cycle"], cycle_matrix(3)),
             (fig4_run.variants["g1"], presets.fork_matrix()),
             (handover_runs["left"].ticks, handover_runconfig().T)]
    points = []
    for ticks, T in pools:
        stride = max(1, len(ticks) // 340)
        points.extend((t.x, T) for t in ticks[::stride])
    points = points[:1000]
    assert len(points) == 1000
    for x, T in points:
        lam_t = transition_activations(x, T)
        lam_s = state_activations(x, lam_t)
        lam = combine(lam_t, lam_s)
        assert abs(lam.sum() - 1.0) <= 1e-9
        phi, valid = phases(x)
        for s in (1e-3, 1.0, 1e3):
            np.testing.assert_allclose(transition_activations(s * x, T), lam_t, atol=1e-12)
            phi_s, valid_s = phases(s * x)
            both = valid & valid_s  # the validity mask is absolute-scale dependent
            np.testing.assert_allclose(phi_s[both], phi[both], atol=1e-12)
    ok("partition of unity within 1e-9 and scale invariance within 1e-12 "
       "on 1000 trajectory points across presets")


def test_fig5_speed_scaling(fig5_run):
    """Speed exponents {-5, 0, +5}: adjacent duration ratios 2^5 +- 20%."""
    fig5_run.check()
    d = fig5_run.measurements["durations"]
    r1, r2 = d["slow"] / d["normal"], d["normal"] / d["fast"]
    span = d["slow"] / d["fast"]
    assert 0.8 * 32 <= r1 <= 1.25 * 32
    assert 0.8 * 32 <= r2 <= 1.25 * 32
    ok(f"transition durations scale 2^5 +- 20% per step (ratios {r1:.1f}, {r2:.1f}), "
       f"{span:.0f}x overall (~3 orders of magnitude)")


def test_fig6_halt_and_reversal(fig6_run):
    """Mid-transition greediness switch on the 0->{1,2} fork: (1,0,0) freezes
    the phase (|dPhi| < 0.01 over 1 s); (1,-1,-1) reactivates the
    predecessor above 0.99."""
    fig6_run.check()
    m = fig6_run.measurements
    assert m["halt"]["phase_drift_1s"] < 0.01
    assert m["reverse"]["predecessor_peak"] > 0.99
    ok(f"halt drift {m['halt']['phase_drift_1s']:.4f} < 0.01 over 1 s; reversal "
       f"predecessor activation {m['reverse']['predecessor_peak']:.4f} > 0.99")


def test_fig4_decisiveness(fig4_run):
    """55:45 biased fork, small noise, 5 seeds: the losing branch dies
    strictly earlier under g=8 than under g=1."""
    fig4_run.check()
    e = fig4_run.measurements["extinction"]
    assert all(b < a for a, b in zip(e["g1"], e["g8"]))
    ok(f"losing-branch extinction earlier for g=8 in 5/5 seeds "
       f"(g1 mean {np.mean(e['g1']):.2f}s vs g8 mean {np.mean(e['g8']):.2f}s)")


def test_fig7_reconsideration(fig7_run):
    """All three published greediness switch patterns flip an
    initially-toward-s1 run to finish at s2 (> 0.99); the (0,-1,20) pattern
    shows the largest instantaneous reversal of the losing phase."""
    fig7_run.check()
    m = fig7_run.measurements
    for label in ("reluctant", "gradual", "backtrack"):
        assert m[label]["final_winner_activation"] > 0.99
    drops = {k: v["losing_phase_drop"] for k, v in m.items()}
    assert drops["backtrack"] < min(drops["reluctant"], drops["gradual"])
    ok(f"all three patterns flip to the alternate successor (>0.99); "
       f"instantaneous phase reversal largest for (0,-1,20): {drops}")


def test_blending_oracle_and_continuity(handover_runs):
    """Mixture mean/cov match a 1e6-sample Monte Carlo oracle; the blended
    command is continuous across every boundary of the handover run."""
    rc = handover_runconfig()
    goals, prims = rc.goals.goals, rc.goals.primitives
    lift, rl, rr = rc.index("lift"), rc.index("reach_left"), rc.index("reach_right")
    lam = np.zeros((rc.n, rc.n))
    lam[rl, lift], lam[rr, lift] = 0.6, 0.4
    phi = np.zeros((rc.n, rc.n))
    phi[rl, lift] = phi[rr, lift] = 0.7
    cmd = blend(lam, phi, goals, prims)

    rng = np.random.default_rng(7)
    n = 1_000_000
    batches = 20
    comps = [evaluate_primitive(prims[(rl, lift)], 0.7)[:2],
             evaluate_primitive(prims[(rr, lift)], 0.7)[:2]]
    per_batch = n // batches
    batch_means, batch_covs = [], []
    for _ in range(batches):
        counts = rng.multinomial(per_batch, [0.6, 0.4])
        chunks = []
        for (mean, cov), cnt in zip(comps, counts):
            chol = np.linalg.cholesky(cov)
            chunks.append(mean + rng.standard_normal((cnt, rc.goals.dimension)) @ chol.T)
        samples = np.vstack(chunks)
        batch_means.append(samples.mean(axis=0))
        batch_covs.append(np.cov(samples.T))
    mc_mean = np.mean(batch_means, axis=0)
    mc_cov = np.mean(batch_covs, axis=0)
    # mean: exact mixture sigma over sqrt(n); covariance: empirical batch SE
    # (mixture fourth moments are heavy, the Gaussian formula underestimates)
    sigma_mean = np.sqrt(np.diag(cmd.cov) / n)
    se_cov = np.std(batch_covs, axis=0, ddof=1) / np.sqrt(batches)
    assert np.all(np.abs(mc_mean - cmd.mean) <= 3.0 * sigma_mean + 1e-12)
    assert np.all(np.abs(mc_cov - cmd.cov) <= 4.0 * se_cov + 1e-9)

    worst = 0.0
    for trace in handover_runs.values():
        means = np.array([t.command.mean for t in trace.ticks])
        worst = max(worst, float(np.linalg.norm(np.diff(means, axis=0), axis=1).max()))
    assert worst < COMMAND_JUMP_BOUND
    ok(f"blend matches 1e6-sample Monte Carlo oracle (3 sigma mean, 4 sigma cov); "
       f"max command step {worst:.5f} < {COMMAND_JUMP_BOUND} across all handover runs")


def test_handover_scenario(handover_runs):
    """Scripted left/right/both/disengaged runs: exclusivity, one-tick
    responsiveness, abort safety; fully headless."""
    rc = handover_runconfig()
    rl, rr, rel = rc.index("reach_left"), rc.index("reach_right"), rc.index("release")

    for label, trace in handover_runs.items():
        peaks = [max(t.Lambda[i, i] for t in trace.ticks) for i in (rl, rr)]
        assert sum(p > 0.9 for p in peaks) == 1, f"{label}: reach peaks {peaks}"
    seq_l = handover_runs["left"].dominant_sequence()
    seq_r = handover_runs["right"].dominant_sequence()
    assert "reach_left" in seq_l and "reach_right" not in seq_l
    assert "reach_right" in seq_r and "reach_left" not in seq_r

    dis = handover_runs["disengaged"]
    ts = np.array([t.t for t in dis.ticks])
    k = int(np.searchsorted(ts, DISENGAGE_AT + 1e-9))
    assert dis.ticks[k].t - DISENGAGE_AT <= rc.dt + 1e-9
    assert dis.ticks[k].g[rel] == -2.0

    after = ts >= DISENGAGE_AT
    lam_rel = np.array([t.Lambda[rel, rel] for t in dis.ticks])
    assert lam_rel[after].max() < 0.1
    seq_d = dis.dominant_sequence()
    assert "retract" in seq_d and "release" not in seq_d
    ok("handover: exclusivity holds in all four runs, cue honored within one "
       "tick, release stays < 0.1 after disengage (headless)")


def test_determinism_byte_identical():
    """fig3 trace re-runs byte-identical with zero noise; a seeded noisy run
    re-runs byte-identical too."""
    def trace_bytes(**kw):
        buf = io.StringIO()
        writer = TraceWriter(buf, every=20)
        for tick in presets.fig3(duration=6.0, **kw).variants["cycle"]:
            writer.feed(tick)
        return buf.getvalue()

    assert trace_bytes() == trace_bytes()

    def noisy_bytes(seed):
        from phasta.modulation import ModulationInputs
        from phasta.session import Session
        cfg = SystemConfig.canonical(cycle_matrix(3), alpha0=A0)
        inputs = ModulationInputs.neutral(3)
        inputs.bias_offset = np.full(3, 5e-5)
        inputs.epsilon = 1e-6
        buf = io.StringIO()
        writer = TraceWriter(buf, every=20)
        for tick in Session(cfg, inputs, seed=seed).run(6.0):
            writer.feed(tick)
        return buf.getvalue()

    assert noisy_bytes(9) == noisy_bytes(9)
    assert noisy_bytes(9) != noisy_bytes(10)
    ok("byte-identical re-runs: fig3 with epsilon=0 and a seeded epsilon>0 run")
