import numpy as np
import pytest

from phasta.dynamics import SystemConfig, cycle_matrix, fork_matrix
from phasta.errors import InvalidTransitionMatrixError, ParameterDomainError
from phasta.modulation import (
    ModulationInputs, apply_transition_edit, build_greediness, resolve_bias, speed_factor,
)
from phasta.observables import snapshot, transition_activations
from phasta.session import Session


def fork_session(bias_toward_1=0.02, bias_toward_2=0.0, offset=5e-5, dt=1e-3):
    cfg = SystemConfig.canonical(fork_matrix(), alpha0=10.0, dt=dt)
    inputs = ModulationInputs.neutral(3)
    inputs.B[1, 0] = bias_toward_1
    inputs.B[2, 0] = bias_toward_2
    inputs.bias_offset = np.full(3, offset)
    return Session(cfg, inputs)


def run_until_mid_transition(session, j=1, i=0):
    """Step until transition i->j is clearly active and mid-phase."""
    for _ in range(int(6.0 / session.cfg.dt)):
        tick = session.step_once()
        if tick.Lambda[j, i] > 0.5 and 0.3 <= tick.Phi[j, i] <= 0.6:
            return tick
    raise AssertionError("transition never reached mid-phase")


class TestResolveBias:

    def test_zero_bias(self):
        x = np.array([0.9, 0.1, 0.0])
        lam = snapshot(x, cycle_matrix(3)).Lambda
        np.testing.assert_array_equal(resolve_bias(lam, np.zeros((3, 3)), x), np.zeros(3))

    def test_hand_computed_point(self):
        # oracle: Lambda[1,0] from the activation formula, then (Lambda o B) . x
        T = cycle_matrix(3)
        x = np.array([0.99, 0.01, 0.0])
        lam_expected = 16 * 0.01 * 0.99 * (0.99 ** 2 + 0.01 ** 2) / (1.0 ** 4 + 1.0 ** 4)
        B = np.zeros((3, 3))
        B[1, 0] = 0.1
        snap = snapshot(x, T)
        assert snap.Lambda[1, 0] == pytest.approx(lam_expected, abs=1e-12)
        assert snap.Lambda[1, 0] == pytest.approx(0.0776, abs=5e-5)
        delta = resolve_bias(snap.Lambda, B, x)
        assert delta[1] == pytest.approx(lam_expected * 0.1 * 0.99, rel=1e-9)
        assert delta[0] == 0.0 and delta[2] == 0.0

    def test_floor_bootstrap(self):
        # at the floor, the resolved bias is positive but of order 8*x_min,
        # which is why a floor (not exact zero) is needed at all
        T = cycle_matrix(3)
        x_min = 1e-10
        x = np.array([1.0, x_min, x_min])
        lam_t = transition_activations(x, T)
        B = np.zeros((3, 3))
        B[1, 0] = 0.1
        delta = resolve_bias(lam_t, B, x)
        assert 0.0 < delta[1] <= lam_t[1, 0] * 0.1 * 1.0 + 1e-30
        assert lam_t[1, 0] == pytest.approx(8.0 * x_min, rel=1e-3)


class TestSpeedFactor:

    def test_neutral(self):
        lam = np.eye(3) / 3.0
        assert speed_factor(lam, np.zeros((3, 3))) == 1.0

    def test_mid_transition_slowdown(self):
        lam = np.zeros((3, 3))
        lam[1, 0] = 1.0
        A = np.zeros((3, 3))
        A[1, 0] = -5.0
        assert speed_factor(lam, A) == pytest.approx(1.0 / 32.0)

    def test_state_speedup(self):
        lam = np.zeros((3, 3))
        lam[1, 1] = 1.0
        A = np.zeros((3, 3))
        A[1, 1] = 3.0
        assert speed_factor(lam, A) == pytest.approx(8.0)


class TestBuildGreediness:

    def test_neutral_is_exactly_zero(self):
        rng = np.random.default_rng(3)
        for n in (3, 5, 7):
            T = (rng.uniform(size=(n, n)) < 0.4).astype(float)
            np.fill_diagonal(T, 0.0)
            gm = build_greediness(np.ones(n), T)
            assert np.array_equal(gm.G, np.zeros((n, n)))

    def test_halt_values(self):
        gm = build_greediness(np.array([1.0, 0.0, 0.0]), fork_matrix())
        np.testing.assert_allclose(gm.G_fwd[1], -0.5)
        np.testing.assert_allclose(gm.G_fwd[2], -0.5)
        np.testing.assert_allclose(gm.G_fwd[0], 0.0)

    def test_forward_greediness_saturates(self):
        gm = build_greediness(np.array([20.0, -50.0, 1.0]), fork_matrix())
        assert np.all(gm.G_fwd >= -1.0) and np.all(gm.G_fwd <= 0.0)

    def test_competition_only_between_common_successors(self):
        # cycle has no pair of states sharing a predecessor
        gm = build_greediness(np.array([5.0, 5.0, 5.0]), cycle_matrix(3))
        fork = build_greediness(np.array([5.0, 5.0, 5.0]), fork_matrix())
        assert gm.G[2, 1] == 0.0 and gm.G[1, 2] == 0.0
        assert fork.G[2, 1] == -2.0 and fork.G[1, 2] == -2.0


class TestTransitionEdit:

    def test_identity_edit(self):
        cfg = SystemConfig.canonical(cycle_matrix(3))
        cfg2 = apply_transition_edit(cfg, cycle_matrix(3))
        assert np.array_equal(cfg2.T, cfg.T)
        assert np.array_equal(cfg2.rho_o, cfg.rho_o)
        assert np.array_equal(cfg2.rho_delta, cfg.rho_delta)

    def test_rejects_self_loop(self):
        cfg = SystemConfig.canonical(cycle_matrix(3))
        bad = cycle_matrix(3)
        bad[1, 1] = 1.0
        with pytest.raises(InvalidTransitionMatrixError):
            apply_transition_edit(cfg, bad)

    def test_removing_only_exit_pins_the_state(self):
        cfg = SystemConfig.canonical(cycle_matrix(3))
        T_cut = cycle_matrix(3)
        T_cut[1, 0] = 0.0  # state 0 has no successor anymore
        session = Session(apply_transition_edit(cfg, T_cut))
        ticks = session.run(5.0)
        assert all(t.dominant == 0 for t in ticks)
        assert ticks[-1].x[0] == pytest.approx(1.0, abs=1e-3)

    def test_added_shortcut_enables_both_channels(self):
        cfg = SystemConfig.canonical(cycle_matrix(3))
        T_plus = cycle_matrix(3)
        T_plus[2, 0] = 1.0  # shortcut 0->2 next to 0->1
        finals = []
        for target, avoid in ((1, 2), (2, 1)):
            inputs = ModulationInputs.neutral(3)
            inputs.B[target, 0] = 0.1
            inputs.B[avoid, 0] = -2.0   # negative bias pins the other channel
            inputs.bias_offset = np.full(3, 5e-5)
            session = Session(apply_transition_edit(cfg, T_plus), inputs)
            for _ in range(6000):
                tick = session.step_once()
                if tick.dominant != 0:
                    break
            finals.append(tick.dominant)
        assert finals == [1, 2]


class TestGreedinessRegimes:

    def test_halt_freezes_phase(self):
        session = fork_session()
        mid = run_until_mid_transition(session)
        session.submit({"type": "set_greediness", "g": [1.0, 0.0, 0.0]})
        phi0 = mid.Phi[1, 0]
        last = None
        for _ in range(1000):  # 1 s
            last = session.step_once()
        assert abs(last.Phi[1, 0] - phi0) < 0.01

    def test_negative_greediness_reverses(self):
        session = fork_session()
        mid = run_until_mid_transition(session)
        session.submit({"type": "set_greediness", "g": [1.0, -1.0, -1.0]})
        phi0 = mid.Phi[1, 0]
        best = 0.0
        phi_after = None
        for k in range(4000):
            tick = session.step_once()
            if k == 500:
                phi_after = tick.Phi[1, 0]
            best = max(best, tick.Lambda[0, 0])
        assert phi_after < phi0 - 0.05          # the channel flows backwards
        assert best > 0.99                      # predecessor fully reactivated

    def test_inputs_validation(self):
        inputs = ModulationInputs.neutral(3)
        inputs.A[0, 1] = 99.0
        with pytest.raises(ParameterDomainError):
            inputs.validate()
