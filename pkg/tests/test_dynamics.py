import math

import numpy as np
import pandas as pd
import pytest

from core.exceptions import IntegrationDivergedError, InvalidInputError, InvalidReferenceError
from core.operators import lse, softmax, softmax_jacobian
from models.domain import MatrixGame, Trajectory
from models.models import IntegratorConfig, SolverConfig
from repositories.trajectory_repository import TrajectoryRepository
from services.dynamics_service import (
    SimulationService,
    attach_lyapunov,
    integrate,
    invariant_set_check,
    lyapunov_value,
    monitor_lyapunov,
    replicator_field,
    score_field,
    summarize,
)

Z0 = [1.0, 0.5, 0.0]


@pytest.fixture
def rps_run(rps):
    return integrate(rps, 1.0, Z0, IntegratorConfig(dt=0.01, t_end=50.0, record_every=10))


class TestScoreField:
    def test_rps_rest_point(self, rps):
        np.testing.assert_allclose(score_field(rps, 1.0, np.zeros(3)), 0.0, atol=1e-15)

    def test_zero_game_is_pure_decay(self, zero2):
        np.testing.assert_array_equal(score_field(zero2, 2.0, [1.5, -3.0]), [-1.5, 3.0])

    def test_composition(self, rps):
        z = np.array(Z0)
        expected = rps.payoff_matrix @ softmax(z, 1.0) - z
        np.testing.assert_allclose(score_field(rps, 1.0, z), expected, atol=1e-15)

    def test_dimension_mismatch(self, rps):
        with pytest.raises(InvalidInputError):
            score_field(rps, 1.0, [0.0, 0.0])


class TestIntegrate:
    def test_zero_game_exact_decay(self, zero2):
        traj = integrate(zero2, 1.0, [1.0, -2.0], IntegratorConfig(dt=0.01, t_end=10.0))
        assert traj.t[-1] == 10.0
        np.testing.assert_allclose(traj.final_z, math.exp(-10.0) * np.array([1.0, -2.0]), atol=1e-8)

    def test_rps_from_rest_point_stays(self, rps):
        traj = integrate(rps, 1.0, np.zeros(3), IntegratorConfig(dt=0.1, t_end=5.0))
        np.testing.assert_allclose(traj.z, 0.0, atol=1e-15)

    def test_rps_converges_to_uniform(self, rps_run, rps):
        assert np.abs(rps_run.final_x - 1.0 / 3.0).max() <= 1e-6
        assert np.linalg.norm(score_field(rps, 1.0, rps_run.final_z)) <= 1e-5

    def test_sampling_and_final_time(self, zero2):
        traj = integrate(zero2, 1.0, [1.0, 0.0], IntegratorConfig(dt=0.1, t_end=1.05, record_every=3))
        assert traj.t[0] == 0.0
        assert traj.t[-1] == 1.05
        assert np.all(np.diff(traj.t) > 0)
        # 11 steps: samples at 0, 3, 6, 9 and the final step
        assert len(traj) == 5

    def test_recorded_strategies_match_scores(self, rps_run):
        for z, x in zip(rps_run.z, rps_run.x):
            np.testing.assert_allclose(x, softmax(z, 1.0), atol=1e-12)

    def test_rk4_order(self, zero2):
        z0 = np.array([1.0, -2.0])
        errors = []
        for dt in (0.1, 0.05, 0.025):
            traj = integrate(zero2, 1.0, z0, IntegratorConfig(dt=dt, t_end=1.0, record_every=1))
            errors.append(np.abs(traj.final_z - math.exp(-1.0) * z0).max())
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        assert orders.min() >= 3.8

    @pytest.mark.parametrize("record_every, samples", [(1, 6), (4, 3)])
    def test_divergence_keeps_partial_trajectory(self, monkeypatch, zero2, record_every, samples):
        from services import dynamics_service

        calls = {"n": 0}
        real_field = dynamics_service._field

        def exploding(g, lam, z):
            calls["n"] += 1
            if calls["n"] > 20:
                return np.full_like(z, np.inf)
            return real_field(g, lam, z)

        monkeypatch.setattr(dynamics_service, "_field", exploding)
        with pytest.raises(IntegrationDivergedError) as info:
            integrate(
                zero2,
                1.0,
                [1.0, 1.0],
                IntegratorConfig(dt=0.1, t_end=2.0, record_every=record_every),
            )
        partial = info.value.trajectory
        assert isinstance(partial, Trajectory)
        assert len(partial) == samples
        assert partial.t[-1] == pytest.approx(0.5)
        assert np.all(np.isfinite(partial.z))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            IntegratorConfig(dt=0.0)
        with pytest.raises(ValueError):
            IntegratorConfig(dt=1.0, t_end=0.5)


class TestLyapunov:
    def test_zero_at_reference(self):
        assert lyapunov_value([0.3, -0.1], [0.3, -0.1], 1.0) == 0.0

    def test_shift_degeneracy(self):
        z_star = np.array([0.2, -0.4, 1.0])
        assert abs(lyapunov_value(z_star + 5.0, z_star, 1.5)) <= 1e-10

    def test_direct_formula(self):
        expected = math.log(1 + math.e) - math.log(2) - 0.5
        assert lyapunov_value([1.0, 0.0], [0.0, 0.0], 1.0) == pytest.approx(expected, abs=1e-14)
        assert expected == pytest.approx(0.12011, abs=1e-5)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            lyapunov_value([1.0, 0.0], [0.0, 0.0, 0.0], 1.0)

    def test_rps_dissipation(self, rps_run):
        report = monitor_lyapunov(rps_run, np.zeros(3), 1.0)
        assert report.passed
        assert report.statistic <= 1e-10
        v = attach_lyapunov(rps_run, np.zeros(3)).v
        assert np.all(np.diff(v) <= 1e-10)
        assert v[-1] <= 1e-10

    def test_constant_trajectory(self, rps):
        traj = integrate(rps, 1.0, np.zeros(3), IntegratorConfig(dt=0.1, t_end=1.0, record_every=1))
        report = monitor_lyapunov(traj, np.zeros(3), 1.0)
        assert report.passed
        assert report.statistic == 0.0

    def test_reference_must_be_rest_point(self, rps_run):
        with pytest.raises(InvalidReferenceError):
            monitor_lyapunov(rps_run, [1.0, 0.0, 0.0], 1.0)

    def test_unstable_game_reports_without_raising(self, identity3):
        traj = integrate(identity3, 1.0, [0.5, 0.0, -0.5], IntegratorConfig(dt=0.05, t_end=10.0))
        report = monitor_lyapunov(traj, np.full(3, 1.0 / 3.0), 1.0)
        assert report.property == "lyapunov_dissipation"
        assert report.n_samples == len(traj) - 1


class TestReplicator:
    def test_vertex_is_rest_point(self):
        np.testing.assert_array_equal(replicator_field([1.0, 0.0, 0.0], [3.0, -1.0, 2.0], 1.0), 0.0)

    def test_uniform_against_componentwise_formula(self):
        np.testing.assert_allclose(
            replicator_field([1 / 3] * 3, [1.0, 0.0, 0.0], 1.0), [2 / 9, -1 / 9, -1 / 9], atol=1e-15
        )

    def test_constant_payoff_gives_zero(self):
        np.testing.assert_allclose(replicator_field([0.2, 0.5, 0.3], [4.0] * 3, 2.0), 0.0, atol=1e-15)

    def test_off_simplex(self):
        with pytest.raises(InvalidInputError):
            replicator_field([0.5, 0.6], [1.0, 0.0], 1.0)

    def test_matches_jacobian_product(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            n = int(rng.integers(2, 8))
            z = rng.uniform(-5, 5, n)
            u = rng.uniform(-5, 5, n)
            lam = float(rng.uniform(0.1, 10))
            field = replicator_field(softmax(z, lam), u, lam)
            assert abs(field.sum()) <= 1e-12
            np.testing.assert_allclose(field, softmax_jacobian(z, lam) @ u, atol=1e-12)


class TestInvariantSet:
    def test_rps_stays_in_ball(self, rps_run, rps):
        report = invariant_set_check(rps_run, rps)
        assert report.passed
        assert report.statistic <= math.sqrt(3) + 1e-8

    def test_start_outside_ball(self, rps):
        traj = integrate(rps, 1.0, [10.0, -4.0, 3.0], IntegratorConfig(dt=0.05, t_end=5.0))
        report = invariant_set_check(traj, rps)
        assert report.passed
        assert report.statistic == pytest.approx(np.linalg.norm([10.0, -4.0, 3.0]))

    def test_zero_game_norm_decays(self, zero2):
        traj = integrate(zero2, 1.0, [3.0, 4.0], IntegratorConfig(dt=0.05, t_end=3.0))
        assert invariant_set_check(traj, zero2).passed
        assert np.all(np.diff(np.linalg.norm(traj.z, axis=1)) < 0)


class TestSimulationService:
    def test_writes_csv_with_lyapunov_column(self, tmp_path, rps):
        service = SimulationService(TrajectoryRepository(tmp_path))
        traj, summary = service.simulate(
            rps, 1.0, Z0, IntegratorConfig(t_end=5.0), SolverConfig(), out="traj.csv"
        )
        frame = pd.read_csv(tmp_path / "traj.csv")
        assert list(frame.columns) == ["t", "z_1", "z_2", "z_3", "x_1", "x_2", "x_3", "V"]
        assert len(frame) == len(traj)
        assert frame["V"].notna().all()
        assert summary.final_v == pytest.approx(traj.v[-1])

    def test_v_column_empty_without_reference(self, tmp_path, identity3):
        service = SimulationService(TrajectoryRepository(tmp_path))
        _, summary = service.simulate(
            identity3,
            1.0,
            [2.0, 0.0, -1.0],
            IntegratorConfig(t_end=1.0),
            SolverConfig(max_iter=1),
            out="traj.csv",
        )
        assert summary.final_v is None
        frame = pd.read_csv(tmp_path / "traj.csv")
        assert frame["V"].isna().all()

    def test_csv_round_trip(self, tmp_path, rps_run):
        repo = TrajectoryRepository(tmp_path)
        attach_lyapunov(rps_run, np.zeros(3))
        repo.save("run.csv", rps_run)
        loaded = repo.load("run.csv", lam=1.0)
        np.testing.assert_array_equal(loaded.z, rps_run.z)
        np.testing.assert_array_equal(loaded.v, rps_run.v)

    def test_summary_samples(self, rps):
        traj = integrate(rps, 1.0, Z0, IntegratorConfig(dt=0.1, t_end=1.0, record_every=5))
        summary = summarize(traj)
        assert [s.t for s in summary.samples] == pytest.approx([0.0, 0.5, 1.0])
        assert summary.rest_point_residual > 0.0

    def test_lse_consistency(self, rps_run):
        v = attach_lyapunov(rps_run, np.zeros(3)).v
        assert v[0] == pytest.approx(lse(Z0, 1.0) - math.log(3) - np.mean(Z0), abs=1e-14)
