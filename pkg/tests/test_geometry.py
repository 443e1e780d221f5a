import numpy as np
import pytest

from reachavoid.core import DegenerateGeometryError, RegionMismatchError, UnsupportedRegimeError
from reachavoid.geometry import (
    ApolloniusSphere,
    BisectorPlane,
    apollonius_locus,
    closest_point_to_origin,
    fibonacci_sphere_points,
    sample_locus,
)


class TestApolloniusLocus:
    def test_collinear_sphere(self):
        # On the z-axis the equal-time points solve |z-1|/U = |z+1|/V,
        # giving z in {1/3, 3}: center 5/3, radius 4/3.
        locus = apollonius_locus([0, 0, 1], [0, 0, -1], 0.5)
        assert isinstance(locus, ApolloniusSphere)
        assert locus.center == pytest.approx([0, 0, 5 / 3])
        assert locus.radius == pytest.approx(4 / 3)

    def test_equal_speed_plane(self):
        locus = apollonius_locus([0, 0, 2], [0, 0, 1], 1.0)
        assert isinstance(locus, BisectorPlane)
        point, dist = closest_point_to_origin(locus)
        assert point == pytest.approx([0, 0, 1.5])
        assert dist == pytest.approx(1.5)

    def test_sphere_satisfies_equal_time_definition(self):
        # Positions of the E1/P3 pair in the pursuer-win 3v3 example.
        x_E = np.array([4.92, -7.91, 4.43])
        x_P = np.array([4.76, -13.35, -0.61])
        alpha = 1.69 / 2.28
        locus = apollonius_locus(x_E, x_P, alpha)
        for x in sample_locus(locus, 100):
            t_E = np.linalg.norm(x - x_E) / 1.69
            t_P = np.linalg.norm(x - x_P) / 2.28
            assert abs(t_E - t_P) <= 1e-9 * t_E

    def test_sphere_point_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            x_E = rng.uniform(-10, 10, 3)
            x_P = rng.uniform(-10, 10, 3)
            if np.linalg.norm(x_E - x_P) < 1e-2:
                continue
            alpha = rng.uniform(0.1, 0.99)
            locus = apollonius_locus(x_E, x_P, alpha)
            for x in sample_locus(locus, 20):
                lhs = alpha**2 * np.linalg.norm(x - x_P) ** 2
                rhs = np.linalg.norm(x - x_E) ** 2
                assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_faster_evader_rejected(self):
        with pytest.raises(UnsupportedRegimeError):
            apollonius_locus([0, 0, 1], [0, 0, -1], 1.5)

    def test_coincident_positions_rejected(self):
        with pytest.raises(DegenerateGeometryError):
            apollonius_locus([1, 2, 3], [1, 2, 3], 0.5)
        with pytest.raises(DegenerateGeometryError):
            apollonius_locus([1, 2, 3], [1, 2, 3.0005], 0.5, min_separation=1e-3)


class TestClosestPoint:
    def test_collinear_interception_point(self):
        locus = ApolloniusSphere(center=np.array([0.0, 0, 5 / 3]), radius=4 / 3)
        point, dist = closest_point_to_origin(locus)
        assert point == pytest.approx([0, 0, 1 / 3])
        assert dist == pytest.approx(1 / 3)

    def test_scaled_center(self):
        locus = ApolloniusSphere(center=np.array([3.0, 4.0, 0.0]), radius=1.0)
        point, dist = closest_point_to_origin(locus)
        assert dist == pytest.approx(4.0)
        assert point == pytest.approx(np.array([3.0, 4.0, 0.0]) * 4 / 5)

    def test_origin_inside_sphere_rejected(self):
        locus = ApolloniusSphere(center=np.array([0.0, 0.0, 0.5]), radius=1.0)
        with pytest.raises(RegionMismatchError):
            closest_point_to_origin(locus)

    def test_point_lies_on_locus_and_is_minimal(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            x_E = rng.uniform(-8, 8, 3)
            x_P = rng.uniform(-8, 8, 3)
            alpha = rng.uniform(0.2, 0.9)
            if np.linalg.norm(x_E - x_P) < 1e-2:
                continue
            locus = apollonius_locus(x_E, x_P, alpha)
            if np.linalg.norm(locus.center) <= locus.radius:
                continue
            point, dist = closest_point_to_origin(locus)
            on_sphere = np.linalg.norm(point - locus.center)
            assert on_sphere == pytest.approx(locus.radius, rel=1e-9)
            sampled = sample_locus(locus, 500)
            assert dist <= np.linalg.norm(sampled, axis=1).min() + 1e-9


class TestEqualSpeedLimit:
    def test_sphere_distance_converges_to_plane_distance(self):
        # Evader farther from the target than the pursuer, so the origin
        # stays outside the sphere all the way to the plane limit.
        x_E = np.array([-1.0, 4.0, 0.5])
        x_P = np.array([2.0, -1.0, 3.0])
        _, plane_dist = closest_point_to_origin(apollonius_locus(x_E, x_P, 1.0))
        errors = []
        for eps in (1e-3, 1e-5):
            locus = apollonius_locus(x_E, x_P, 1.0 - eps)
            _, dist = closest_point_to_origin(locus)
            errors.append(abs(dist - plane_dist) / plane_dist)
        assert errors[0] < 1e-2
        assert errors[1] < 1e-4
        assert errors[1] < errors[0]


class TestSampling:
    def test_fibonacci_points_are_unit_and_spread(self):
        pts = fibonacci_sphere_points(256)
        assert np.linalg.norm(pts, axis=1) == pytest.approx(np.ones(256))
        # Mean of a near-uniform sample sits close to the center.
        assert np.linalg.norm(pts.mean(axis=0)) < 0.02

    def test_plane_samples_satisfy_plane_equation(self):
        locus = apollonius_locus([0, 0, 2], [0, 0, 1], 1.0)
        pts = sample_locus(locus, 64, extent=3.0)
        residual = pts @ locus.unit_normal - locus.offset
        assert np.abs(residual).max() < 1e-12
