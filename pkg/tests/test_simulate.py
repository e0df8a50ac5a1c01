import numpy as np
import pytest

from sairs_switch import (
    EpidemicParams,
    IntegratorConfig,
    RegimePath,
    SemiMarkovSpec,
    Exponential,
    Trajectory,
    check_extinction,
    default_eta_cap,
    derive_seed,
    dfe,
    endemic_equilibrium,
    ensemble,
    ergodic_weights,
    integrate_between_jumps,
    occupation,
    persistence_bounds,
    psi_reachable,
    simulate,
    stationarity_tv,
    time_means,
)

SET_TOL = 1e-9


def make_traj(times, states, regimes=None):
    times = np.asarray(times, dtype=float)
    states = np.asarray(states, dtype=float)
    if regimes is None:
        regimes = np.zeros(times.shape[0], dtype=np.int64)
    path = RegimePath([0.0], [0], horizon=float(times[-1]))
    return Trajectory(times=times, states=states, regimes=np.asarray(regimes),
                      eta=times.copy(), seed=0, path=path)


def near_zero_params():
    # rates at 1e-30 satisfy the positivity invariants while leaving the
    # state numerically frozen
    tiny = 1e-30
    return EpidemicParams((0.0,), (0.0,), tiny, tiny, alpha=tiny, gamma=0.0,
                          nu=0.0, mu=tiny)


# ---------------------------------------------------------------------------
# fixed-regime integration
# ---------------------------------------------------------------------------

class TestIntegratorConfig:
    def test_invariants(self):
        IntegratorConfig(step=0.05, sample_every=0.05)
        with pytest.raises(ValueError):
            IntegratorConfig(step=0.2, sample_every=0.1)
        with pytest.raises(ValueError):
            IntegratorConfig(step=0.0)
        with pytest.raises(ValueError):
            IntegratorConfig(clamp_eps=1e-8)


class TestIntegrateBetweenJumps:
    def test_zero_drift_is_constant(self):
        x0 = np.array([0.25, 0.25, 0.25, 0.25])
        times, states = integrate_between_jumps(near_zero_params(), 0, x0, 0.0, 5.0)
        assert np.array_equal(states, np.tile(x0, (times.shape[0], 1)))

    def test_subcritical_regime_approaches_dfe(self, case_3a):
        params = case_3a.params
        _, states = integrate_between_jumps(
            params, 0, [0.6, 0.2, 0.1, 0.1], 0.0, 2000.0
        )
        target = dfe(params)
        assert np.max(np.abs(states[-1, :3] - target)) < 1e-6

    def test_exact_landing_and_grid(self, case_3a):
        config = IntegratorConfig(step=0.01, sample_every=0.1)
        times, states = integrate_between_jumps(
            case_3a.params, 1, [0.6, 0.2, 0.1, 0.1], 0.37, 1.02, config
        )
        assert times[0] == 0.37 and times[-1] == 1.02
        interior = times[1:-1]
        np.testing.assert_allclose(interior / 0.1, np.round(interior / 0.1), atol=1e-12)
        assert states.shape == (times.shape[0], 4)

    def test_rk4_fourth_order(self, case_3a):
        # Richardson: halving the step cuts the error ~16x against a step/8
        # reference solution
        params = case_3a.params
        x0 = [0.6, 0.2, 0.1, 0.1]

        def final_state(step):
            config = IntegratorConfig(step=step, sample_every=50.0)
            return integrate_between_jumps(params, 1, x0, 0.0, 50.0, config)[1][-1]

        ref = final_state(0.025)
        err_h = np.max(np.abs(final_state(0.2) - ref))
        err_h2 = np.max(np.abs(final_state(0.1) - ref))
        assert 10.0 < err_h / err_h2 < 22.0

    def test_invalid_interval(self, case_3a):
        with pytest.raises(ValueError):
            integrate_between_jumps(case_3a.params, 0, [0.6, 0.2, 0.1, 0.1], 1.0, 1.0)


# ---------------------------------------------------------------------------
# hybrid simulation
# ---------------------------------------------------------------------------

class TestSimulate:
    def test_single_state_spec_rejected(self, case_3a):
        one_state = SemiMarkovSpec([[0.0]], (Exponential(1.0),))
        params = EpidemicParams((0.5,), (0.5,), 0.07, 0.07, 0.5, 0.02, 0.01, 0.001)
        with pytest.raises(ValueError, match="state count"):
            simulate(params, one_state, [0.6, 0.2, 0.1, 0.1], 0, 10.0)

    def test_regime_count_mismatch_rejected(self, case_3a, fig1_spec_a):
        params = EpidemicParams((0.5,), (0.5,), 0.07, 0.07, 0.5, 0.02, 0.01, 0.001)
        with pytest.raises(ValueError, match="regimes"):
            simulate(params, fig1_spec_a, [0.6, 0.2, 0.1, 0.1], 0, 10.0)

    def test_deterministic_given_seed(self, case_3a):
        kwargs = dict(x0=case_3a.x0.as_array(), r0=0, horizon=300.0, seed=1234)
        a = simulate(case_3a.params, case_3a.spec, **kwargs)
        b = simulate(case_3a.params, case_3a.spec, **kwargs)
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.states, b.states)
        assert np.array_equal(a.regimes, b.regimes)
        assert np.array_equal(a.eta, b.eta)
        assert a.path == b.path

    def test_invariant_set_and_jump_alignment(self, case_1a):
        traj = simulate(case_1a.params, case_1a.spec, case_1a.x0.as_array(), 0,
                        500.0, seed=3)
        assert np.all(traj.states >= -SET_TOL)
        assert np.all(traj.states <= 1.0 + SET_TOL)
        assert np.max(np.abs(traj.states.sum(axis=1) - 1.0)) <= SET_TOL
        # every jump instant is a sample, reporting the new regime and eta=0
        for k, tau in enumerate(traj.path.jump_times):
            i = np.searchsorted(traj.times, tau)
            assert traj.times[i] == tau
            assert traj.regimes[i] == traj.path.states[k]
            assert traj.eta[i] == 0.0

    def test_regimes_eta_consistent_with_path(self, case_1a):
        from sairs_switch import eta_at, regime_at

        traj = simulate(case_1a.params, case_1a.spec, case_1a.x0.as_array(), 0,
                        200.0, seed=9)
        np.testing.assert_array_equal(traj.regimes, regime_at(traj.path, traj.times))
        np.testing.assert_allclose(traj.eta, eta_at(traj.path, traj.times), atol=0.0)

    def test_3d_reduction_matches_4d(self, case_3a):
        kwargs = dict(x0=case_3a.x0.as_array(), r0=0, horizon=500.0, seed=21)
        t4 = simulate(case_3a.params, case_3a.spec, **kwargs)
        t3 = simulate(case_3a.params, case_3a.spec, dims=3, **kwargs)
        assert t3.path == t4.path
        assert np.max(np.abs(t3.states - t4.states)) <= 1e-7

    def test_extinction_scenario_smoke(self, case_3c):
        flags = []
        for seed in range(3):
            traj = simulate(case_3c.params, case_3c.spec, case_3c.x0.as_array(), 0,
                            5000.0, seed=derive_seed(1000, seed))
            flags.append(check_extinction(traj).extinct)
        assert sum(flags) >= 2


# ---------------------------------------------------------------------------
# time means and extinction detection
# ---------------------------------------------------------------------------

class TestTimeMeans:
    def test_constant_trajectory(self):
        times = np.linspace(0.0, 10.0, 101)
        states = np.tile([0.4, 0.3, 0.2, 0.1], (101, 1))
        tm = time_means(make_traj(times, states))
        assert tm.S == pytest.approx(0.4)
        assert tm.AI == pytest.approx(0.5)

    def test_piecewise_hand_integral(self):
        # S ramps 0->1 over [0,1] then holds: integral 0.5 + 2 = 2.5 over 3
        times = np.array([0.0, 1.0, 3.0])
        states = np.array([[0.0, 0.5, 0.25, 0.25],
                           [1.0, 0.0, 0.0, 0.0],
                           [1.0, 0.0, 0.0, 0.0]])
        tm = time_means(make_traj(times, states))
        assert tm.S == pytest.approx(2.5 / 3.0)

    def test_burn_in_window(self):
        times = np.array([0.0, 1.0, 2.0])
        states = np.array([[0.0, 0.5, 0.25, 0.25],
                           [1.0, 0.0, 0.0, 0.0],
                           [1.0, 0.0, 0.0, 0.0]])
        tm = time_means(make_traj(times, states), burn_in=1.0)
        assert tm.S == pytest.approx(1.0)
        with pytest.raises(ValueError):
            time_means(make_traj(times, states), burn_in=2.0)

    def test_persistent_case_exceeds_bound_smoke(self, case_3a):
        bound = persistence_bounds(case_3a.params, ergodic_weights(case_3a.spec))
        traj = simulate(case_3a.params, case_3a.spec, case_3a.x0.as_array(), 0,
                        3000.0, seed=11)
        tm = time_means(traj, burn_in=500.0)
        assert tm.AI >= bound.ai_bound
        assert tm.S >= bound.s_bound
        # weak persistence: the running maximum clears the bound as well
        after = traj.times >= 500.0
        assert traj.AI[after].max() >= bound.ai_bound


class TestCheckExtinction:
    def test_identically_zero_certifies_at_window(self):
        times = np.linspace(0.0, 1000.0, 1001)
        states = np.zeros((1001, 4))
        states[:, 0] = 1.0
        res = check_extinction(make_traj(times, states), threshold=1e-5, window=500.0)
        assert res.extinct and res.time == pytest.approx(500.0)

    def test_late_violation_blocks_certificate(self):
        times = np.linspace(0.0, 1000.0, 1001)
        states = np.zeros((1001, 4))
        states[:, 0] = 1.0
        states[800, 1] = 0.5  # violation at t = 800
        states[800, 0] = 0.5
        res = check_extinction(make_traj(times, states), threshold=1e-5, window=500.0)
        assert not res.extinct and res.time is None
        res = check_extinction(make_traj(times, states), threshold=1e-5, window=200.0)
        assert res.extinct and res.time == pytest.approx(1000.0)

    def test_persistent_run_not_flagged(self, case_3a):
        traj = simulate(case_3a.params, case_3a.spec, case_3a.x0.as_array(), 0,
                        2000.0, seed=5)
        assert not check_extinction(traj).extinct

    def test_parameter_validation(self):
        times = np.array([0.0, 1.0])
        states = np.tile([1.0, 0.0, 0.0, 0.0], (2, 1))
        with pytest.raises(ValueError):
            check_extinction(make_traj(times, states), threshold=0.0)


# ---------------------------------------------------------------------------
# ensembles
# ---------------------------------------------------------------------------

class TestEnsemble:
    def test_single_member_wraps_simulate(self, case_3a):
        summary = ensemble(case_3a.params, case_3a.spec, case_3a.x0.as_array(), 0,
                           200.0, master_seed=77, n=1, burn_in=50.0)
        traj = simulate(case_3a.params, case_3a.spec, case_3a.x0.as_array(), 0,
                        200.0, seed=derive_seed(77, 0))
        tm = time_means(traj, burn_in=50.0)
        assert summary.mean_S[0] == tm.S
        assert summary.mean_AI[0] == tm.AI

    def test_parallel_matches_serial(self, case_3a):
        kwargs = dict(x0=case_3a.x0.as_array(), r0=0, horizon=150.0,
                      master_seed=31, n=6, burn_in=25.0)
        serial = ensemble(case_3a.params, case_3a.spec, workers=1, **kwargs)
        parallel = ensemble(case_3a.params, case_3a.spec, workers=4, **kwargs)
        assert np.array_equal(serial.mean_S, parallel.mean_S)
        assert np.array_equal(serial.mean_AI, parallel.mean_AI)
        assert np.array_equal(serial.extinct, parallel.extinct)
        assert serial.quantiles == parallel.quantiles

    def test_extinction_contrast(self, case_3a, case_3c):
        kwargs = dict(horizon=4000.0, master_seed=5, n=4)
        persistent = ensemble(case_3a.params, case_3a.spec, case_3a.x0.as_array(),
                              0, **kwargs)
        dying = ensemble(case_3c.params, case_3c.spec, case_3c.x0.as_array(),
                         0, **kwargs)
        assert persistent.extinction_fraction <= 0.25
        assert dying.extinction_fraction >= 0.75

    def test_bad_size_rejected(self, case_3a):
        with pytest.raises(ValueError):
            ensemble(case_3a.params, case_3a.spec, case_3a.x0.as_array(), 0, 10.0, n=0)


# ---------------------------------------------------------------------------
# occupation histograms
# ---------------------------------------------------------------------------

class TestOccupation:
    def test_constant_trajectory_single_state_bin(self):
        times = np.linspace(0.0, 30.0, 301)
        states = np.tile([0.25, 0.25, 0.25, 0.25], (301, 1))
        hist = occupation(make_traj(times, states), burn_in=0.0, bins=16,
                          eta_bins=8, eta_cap=20.0)
        marg = hist.state_marginal()
        occupied = np.nonzero(marg)
        assert len(occupied[0]) == 1
        assert marg[4, 4, 4] == pytest.approx(1.0)
        # eta ramps 0..30 against a cap of 20: every eta bin plus the
        # overflow slot carries mass
        eta_marg = hist.counts.sum(axis=(0, 1, 2, 4))
        assert np.all(eta_marg > 0.0)
        assert eta_marg[-1] == pytest.approx(10.0)  # time above the cap
        assert hist.total_weight == pytest.approx(30.0)

    def test_total_weight_matches_window(self, case_3a):
        traj = simulate(case_3a.params, case_3a.spec, case_3a.x0.as_array(), 0,
                        500.0, seed=2)
        hist = occupation(traj, burn_in=123.4, bins=8, eta_bins=4, eta_cap=60.0)
        assert hist.total_weight == pytest.approx(500.0 - 123.4, abs=1e-9)
        window = occupation(traj, burn_in=100.0, t_end=300.0, bins=8, eta_bins=4,
                            eta_cap=60.0)
        assert window.total_weight == pytest.approx(200.0, abs=1e-9)

    def test_window_inside_one_sample_interval(self):
        # burn_in and t_end bracketed by the same pair of samples
        times = np.array([0.0, 1.0, 2.0])
        states = np.tile([0.25, 0.25, 0.25, 0.25], (3, 1))
        hist = occupation(make_traj(times, states), burn_in=1.2, t_end=1.8,
                          bins=4, eta_bins=2, eta_cap=5.0)
        assert hist.total_weight == pytest.approx(0.6)

    def test_regime_marginal_matches_ergodic_fractions(self, case_3a):
        weights = ergodic_weights(case_3a.spec)
        traj = simulate(case_3a.params, case_3a.spec, case_3a.x0.as_array(), 0,
                        20_000.0, seed=14)
        hist = occupation(traj, burn_in=0.0, bins=8, eta_bins=4,
                          eta_cap=default_eta_cap(case_3a.spec))
        np.testing.assert_allclose(
            hist.regime_marginal(), weights.occupation_fractions(), atol=0.02
        )

    def test_binning_validation(self, case_3a):
        traj = simulate(case_3a.params, case_3a.spec, case_3a.x0.as_array(), 0,
                        50.0, seed=2)
        with pytest.raises(ValueError):
            occupation(traj, burn_in=0.0, bins=1)
        with pytest.raises(ValueError):
            occupation(traj, burn_in=60.0)


class TestStationarityTV:
    def test_self_distance_zero(self, case_3a):
        traj = simulate(case_3a.params, case_3a.spec, case_3a.x0.as_array(), 0,
                        300.0, seed=4)
        hist = occupation(traj, burn_in=0.0, bins=8, eta_bins=4, eta_cap=60.0)
        assert stationarity_tv(hist, hist) == 0.0

    def test_disjoint_supports_distance_one(self):
        times = np.linspace(0.0, 10.0, 11)
        low = np.tile([0.1, 0.1, 0.1, 0.7], (11, 1))
        high = np.tile([0.9, 0.05, 0.05, 0.0], (11, 1))
        h1 = occupation(make_traj(times, low), 0.0, bins=8, eta_bins=4, eta_cap=5.0)
        h2 = occupation(make_traj(times, high), 0.0, bins=8, eta_bins=4, eta_cap=5.0)
        assert stationarity_tv(h1, h2) == pytest.approx(1.0)

    def test_binning_mismatch_rejected(self, case_3a):
        traj = simulate(case_3a.params, case_3a.spec, case_3a.x0.as_array(), 0,
                        100.0, seed=4)
        h1 = occupation(traj, 0.0, bins=8, eta_bins=4, eta_cap=60.0)
        h2 = occupation(traj, 0.0, bins=10, eta_bins=4, eta_cap=60.0)
        with pytest.raises(ValueError, match="binning"):
            stationarity_tv(h1, h2)

    def test_windows_of_long_persistent_run_are_close(self, case_3a):
        traj = simulate(case_3a.params, case_3a.spec, case_3a.x0.as_array(), 0,
                        20_000.0, seed=16)
        cap = default_eta_cap(case_3a.spec)
        h1 = occupation(traj, burn_in=2000.0, t_end=11_000.0, bins=8, eta_bins=4,
                        eta_cap=cap)
        h2 = occupation(traj, burn_in=11_000.0, bins=8, eta_bins=4, eta_cap=cap)
        assert stationarity_tv(h1, h2) <= 0.15


# ---------------------------------------------------------------------------
# composed flows
# ---------------------------------------------------------------------------

class TestThreeStateEnvironment:
    """The reference scenarios are all two-state; cover a larger state space
    with mixed holding-law families end to end."""

    def setup_method(self):
        from sairs_switch import Gamma, Weibull

        self.spec = SemiMarkovSpec(
            [[0.0, 0.5, 0.5], [1.0, 0.0, 0.0], [0.3, 0.7, 0.0]],
            (Gamma(4.0, 0.5), Exponential(0.25), Weibull(1.5, 6.0)),
        )
        self.params = EpidemicParams(
            beta_A=(0.05, 0.4, 0.9),
            beta_I=(0.05, 0.4, 0.9),
            delta_A=0.07,
            delta_I=0.07,
            alpha=0.5,
            gamma=0.02,
            nu=0.01,
            mu=0.001,
        )

    def test_simulation_respects_invariants(self):
        traj = simulate(self.params, self.spec, [0.6, 0.2, 0.1, 0.1], 2, 2000.0,
                        seed=71)
        assert set(np.unique(traj.regimes)) == {0, 1, 2}
        assert np.all(traj.states >= -SET_TOL)
        assert np.max(np.abs(traj.states.sum(axis=1) - 1.0)) <= SET_TOL

    def test_regime_occupation_matches_ergodic_weights(self):
        weights = ergodic_weights(self.spec)
        traj = simulate(self.params, self.spec, [0.6, 0.2, 0.1, 0.1], 0, 30_000.0,
                        seed=72)
        hist = occupation(traj, burn_in=1000.0, bins=8, eta_bins=4,
                          eta_cap=default_eta_cap(self.spec))
        np.testing.assert_allclose(
            hist.regime_marginal(), weights.occupation_fractions(), atol=0.03
        )

    def test_threshold_report_complete(self):
        from sairs_switch import Classification, threshold_report

        report = threshold_report(self.params, ergodic_weights(self.spec))
        assert report.composite_r0 is not None
        assert report.classification in set(Classification)


class TestPsiReachable:
    def test_empty_composition_is_identity(self, case_3a):
        start = np.array([0.3, 0.3, 0.2])
        np.testing.assert_array_equal(psi_reachable(case_3a.params, start, []), start)

    def test_single_leg_matches_fixed_regime_flow(self, case_3a):
        start = np.array([0.5, 0.2, 0.1])
        end = psi_reachable(case_3a.params, start, [(1, 7.3)])
        x4 = np.array([0.5, 0.2, 0.1, 0.2])
        _, states = integrate_between_jumps(case_3a.params, 1, x4, 0.0, 7.3)
        np.testing.assert_allclose(end, states[-1, :3], atol=1e-9)

    def test_default_start_is_regime0_equilibrium(self, case_1a):
        # regime 0 of this scenario is subcritical: no equilibrium to start from
        with pytest.raises(ValueError, match="no endemic equilibrium"):
            psi_reachable(case_1a.params, None, [])
        # explicit start works
        x_star = endemic_equilibrium(case_1a.params, 1)
        np.testing.assert_array_equal(psi_reachable(case_1a.params, x_star, []), x_star)

    def test_invalid_legs_rejected(self, case_3a):
        start = np.array([0.3, 0.3, 0.2])
        with pytest.raises(ValueError):
            psi_reachable(case_3a.params, start, [(0, -1.0)])
        with pytest.raises(ValueError):
            psi_reachable(case_3a.params, start, [(7, 1.0)])

    def test_reachable_cloud_absorbs_long_run_trajectory(self, case_3a):
        # composition endpoints from the supercritical equilibrium, binned
        # coarsely and dilated by one bin, must cover the long-run hybrid
        # trajectory points
        params, spec = case_3a.params, case_3a.spec
        bins = 16
        rng = np.random.default_rng(99)
        x_star = endemic_equilibrium(params, 1)

        occupied = set()

        def mark(point):
            occupied.add(tuple(np.clip((point * bins).astype(int), 0, bins - 1)))

        for _ in range(250):
            x = x_star
            mark(x)
            regime = int(rng.integers(2))
            for _ in range(int(rng.integers(2, 9))):
                duration = spec.holding[regime].sample(rng)
                x = psi_reachable(params, x, [(regime, duration)])
                mark(x)
                regime = 1 - regime

        dilated = set()
        for cell in occupied:
            for ds in (-1, 0, 1):
                for da in (-1, 0, 1):
                    for di in (-1, 0, 1):
                        dilated.add((cell[0] + ds, cell[1] + da, cell[2] + di))

        traj = simulate(params, spec, case_3a.x0.as_array(), 0, 10_000.0, seed=23)
        after = traj.times >= 2000.0
        points = traj.states[after, :3]
        cells = np.clip((points * bins).astype(int), 0, bins - 1)
        hits = sum(tuple(c) in dilated for c in cells)
        assert hits / cells.shape[0] >= 0.99
