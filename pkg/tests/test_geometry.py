"""Tests for sensor deployment, trajectories, and distance geometry."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from aircomp import (
    SensorField,
    Trajectory,
    deploy_sensors,
    distance,
    distance_matrix,
    max_distance_bound,
    plan_diameter_trajectory,
)


class TestDeploySensors:
    def test_shape_and_defaults(self):
        field = deploy_sensors(20, 10.0, seed=1)
        assert field.positions.shape == (20, 2)
        assert field.n == 20
        assert_allclose(field.reflection, np.full(20, 0.99))
        assert_allclose(field.data_mean, np.zeros(20))
        assert_allclose(field.data_var, np.ones(20))

    def test_all_inside_disk(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            r = rng.uniform(0.5, 50.0)
            field = deploy_sensors(100, r, seed=int(rng.integers(1 << 31)))
            radii = np.hypot(field.positions[:, 0], field.positions[:, 1])
            assert np.all(radii <= r + 1e-12)

    def test_uniform_area_density(self):
        # uniform on the disk: E[r^2] = R^2/2 and angles uniform
        field = deploy_sensors(200_000, 2.0, seed=3)
        r2 = field.positions[:, 0] ** 2 + field.positions[:, 1] ** 2
        assert r2.mean() == pytest.approx(2.0, rel=0.01)
        # quadrant counts should be balanced
        quad = (field.positions[:, 0] > 0) * 2 + (field.positions[:, 1] > 0)
        counts = np.bincount(quad, minlength=4)
        assert counts.min() > 0.24 * field.n

    def test_deterministic_given_seed(self):
        a = deploy_sensors(50, 10.0, seed=9)
        b = deploy_sensors(50, 10.0, seed=9)
        assert_allclose(a.positions, b.positions)
        c = deploy_sensors(50, 10.0, seed=10)
        assert not np.allclose(a.positions, c.positions)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            deploy_sensors(0, 10.0)
        with pytest.raises(ValueError):
            deploy_sensors(5, -1.0)
        with pytest.raises(ValueError):
            deploy_sensors(5, 10.0, zeta=0.0)
        with pytest.raises(ValueError):
            deploy_sensors(5, 10.0, zeta=1.5)
        with pytest.raises(ValueError):
            deploy_sensors(5, 10.0, data_var=-0.1)


class TestSensorField:
    def test_broadcast_scalars(self):
        pos = np.array([[0.0, 0.0], [1.0, 2.0]])
        field = SensorField(pos, 0.5, 1.0, 2.0)
        assert_allclose(field.reflection, [0.5, 0.5])
        assert_allclose(field.data_mean, [1.0, 1.0])
        assert_allclose(field.data_var, [2.0, 2.0])

    def test_with_parameters(self):
        field = deploy_sensors(4, 10.0, seed=1)
        other = field.with_parameters(data_mean=1.0)
        assert_allclose(other.positions, field.positions)
        assert_allclose(other.data_mean, np.ones(4))
        assert_allclose(field.data_mean, np.zeros(4))

    def test_text_round_trip(self):
        field = deploy_sensors(7, 10.0, zeta=0.7, data_mean=0.3, data_var=1.9, seed=5)
        text = field.to_text()
        back = SensorField.from_text(text)
        assert_allclose(back.positions, field.positions)
        assert_allclose(back.reflection, field.reflection)
        assert_allclose(back.data_mean, field.data_mean)
        assert_allclose(back.data_var, field.data_var)

    def test_from_text_rejects_garbage(self):
        with pytest.raises(ValueError):
            SensorField.from_text("not a field\n")


class TestTrajectory:
    def test_single_stop_at_center(self):
        traj = plan_diameter_trajectory(1, 10.0, 50.0)
        assert traj.k == 1
        assert_allclose(traj.stops, [[0.0, 0.0]])
        assert traj.altitude_h == 50.0

    def test_stops_span_diameter(self):
        traj = plan_diameter_trajectory(5, 10.0, 50.0)
        assert_allclose(traj.stops[:, 0], [-10.0, -5.0, 0.0, 5.0, 10.0])
        assert_allclose(traj.stops[:, 1], np.zeros(5))

    def test_two_stops_are_endpoints(self):
        traj = plan_diameter_trajectory(2, 8.0, 40.0)
        assert_allclose(traj.stops[:, 0], [-8.0, 8.0])

    def test_text_round_trip(self):
        traj = plan_diameter_trajectory(4, 10.0, 55.0)
        back = Trajectory.from_text(traj.to_text())
        assert back.altitude_h == traj.altitude_h
        assert_allclose(back.stops, traj.stops)

    def test_validation(self):
        with pytest.raises(ValueError):
            plan_diameter_trajectory(0, 10.0, 50.0)
        with pytest.raises(ValueError):
            plan_diameter_trajectory(3, 10.0, -1.0)
        with pytest.raises(ValueError):
            Trajectory(0.0, np.array([[0.0, 0.0]]))


class TestDistances:
    def test_single_distance(self):
        field = SensorField(np.array([[3.0, 4.0]]), 1.0, 0.0, 1.0)
        traj = Trajectory(12.0, np.array([[0.0, 0.0]]))
        # 3-4-5 triangle in the plane, altitude 12: sqrt(25 + 144) = 13
        assert distance(field, 0, traj, 0) == pytest.approx(13.0, rel=1e-12)

    def test_matrix_matches_elementwise(self):
        field = deploy_sensors(6, 10.0, seed=2)
        traj = plan_diameter_trajectory(4, 10.0, 50.0)
        mat = distance_matrix(field, traj)
        assert mat.shape == (6, 4)
        for i in range(6):
            for k in range(4):
                assert mat[i, k] == pytest.approx(distance(field, i, traj, k), rel=1e-12)

    def test_bound_formula(self):
        assert max_distance_bound(10.0, 50.0) == pytest.approx(
            50.0 * math.sqrt(1.0 + (20.0 / 50.0) ** 2), rel=1e-12
        )

    def test_bound_holds_over_random_geometry(self):
        # distances from any stop on the diameter to any sensor in the disk
        # stay within [h, h * sqrt(1 + (2 r/h)^2)]
        rng = np.random.default_rng(42)
        for _ in range(300):
            r_cov = rng.uniform(1.0, 30.0)
            h = rng.uniform(5.0, 120.0)
            n = int(rng.integers(1, 40))
            k = int(rng.integers(1, 12))
            field = deploy_sensors(n, r_cov, seed=int(rng.integers(1 << 31)))
            traj = plan_diameter_trajectory(k, r_cov, h)
            d = distance_matrix(field, traj)
            assert np.all(d >= h - 1e-9)
            assert np.all(d <= max_distance_bound(r_cov, h) + 1e-9)
