import numpy as np
import pytest

from reachavoid.core import (
    RegionMismatchError,
    SingularGradientError,
    UnsupportedRegimeError,
)
from reachavoid.duel import (
    DuelState,
    Region,
    barrier_1v1,
    optimal_controls,
    value_evader_region,
    value_for_region,
    value_pursuer_region,
)
from reachavoid.verify import check_gradients_fd, check_hji_residual


def duel(x_E, x_P, U, V):
    return DuelState(np.asarray(x_E, float), np.asarray(x_P, float), U, V)


class TestBarrier:
    def test_equal_speed_positive(self):
        assert barrier_1v1(duel([0, 0, 2], [0, 0, 1], 1.0, 1.0)) == pytest.approx(3.0)

    def test_evader_on_target_never_loses(self):
        s = duel([0, 0, 0], [1, 2, 3], 1.0, 2.0)
        assert barrier_1v1(s) == pytest.approx(-0.25 * 14.0)
        assert barrier_1v1(s) <= 0.0

    def test_arithmetic(self):
        assert barrier_1v1(duel([0, 0, 1], [0, 0, 3], 0.5, 1.0)) == pytest.approx(-1.25)


class TestPursuerRegionValue:
    def test_collinear_interception(self):
        dv = value_pursuer_region(duel([0, 0, 1], [0, 0, -1], 0.5, 1.0))
        assert dv.region is Region.PURSUER_WINS
        assert dv.value == pytest.approx(1 / 3)

    def test_equal_speed_matches_plane_distance(self):
        s = duel([0, 0, 2], [0, 0, 1], 1.7, 1.7)
        dv = value_pursuer_region(s)
        # (R_E^2 - R_P^2) / (2 ||x_E - x_P||) = 3/2
        assert dv.value == pytest.approx(1.5)

    def test_equal_speed_is_the_limit_of_the_sphere_value(self):
        x_E, x_P = [2.0, -1.0, 3.0], [0.5, 0.5, 0.5]
        at_one = value_pursuer_region(duel(x_E, x_P, 1.0, 1.0)).value
        near_one = value_pursuer_region(duel(x_E, x_P, 1.0 - 1e-7, 1.0)).value
        assert at_one == pytest.approx(near_one, rel=1e-5)

    def test_value_positive_and_equals_interception_distance(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            s = duel(rng.uniform(-5, 5, 3), rng.uniform(-5, 5, 3), 0.6, 1.4)
            if barrier_1v1(s) <= 1e-9 or np.linalg.norm(s.x_E - s.x_P) < 1e-2:
                continue
            dv = value_pursuer_region(s)
            assert dv.value > 0.0

    def test_wrong_region_rejected(self):
        with pytest.raises(RegionMismatchError):
            value_pursuer_region(duel([0, 0, 1], [0, 0, 3], 0.5, 1.0))

    def test_faster_evader_rejected(self):
        with pytest.raises(UnsupportedRegimeError):
            value_pursuer_region(duel([0, 0, 5], [0, 0, 1], 2.0, 1.0))


class TestEvaderRegionValue:
    def test_arithmetic(self):
        dv = value_evader_region(duel([0, 0, 1], [0, 0, 3], 0.5, 1.0))
        assert dv.region is Region.EVADER_WINS
        assert dv.value == pytest.approx(-1.0)
        assert dv.grad_E == pytest.approx(np.array([0, 0, 2.0]))
        assert dv.grad_P == pytest.approx(np.array([0, 0, -1.0]))

    def test_evader_already_home(self):
        dv = value_evader_region(duel([0, 0, 0], [3, 4, 0], 0.5, 1.0))
        assert dv.value == pytest.approx(-5.0)
        assert dv.value <= 0.0

    def test_value_never_positive_in_region(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            s = duel(rng.uniform(-5, 5, 3), rng.uniform(-5, 5, 3), 0.7, 1.3)
            if barrier_1v1(s) > 0.0:
                continue
            assert value_evader_region(s).value <= 1e-12

    def test_pursuer_on_target_is_singular(self):
        # A pursuer parked on the target puts the pair in its winning region,
        # so the checked entry point reports the region; the region-pinned
        # evaluator (used mid-simulation) hits the singular gradient instead.
        state = duel([0, 0, 1], [0, 0, 0], 0.5, 1.0)
        with pytest.raises(RegionMismatchError):
            value_evader_region(state)
        with pytest.raises(SingularGradientError):
            value_for_region(state, Region.EVADER_WINS)

    def test_wrong_region_rejected(self):
        with pytest.raises(RegionMismatchError):
            value_evader_region(duel([0, 0, 2], [0, 0, 1], 1.0, 1.0))


class TestOptimalControls:
    def test_collinear_controls_point_at_interception(self):
        u, v = optimal_controls(duel([0, 0, 1], [0, 0, -1], 0.5, 1.0))
        assert u.vector == pytest.approx([0, 0, -0.5])
        assert v.vector == pytest.approx([0, 0, 1.0])

    def test_evader_region_both_head_home(self):
        s = duel([3, 0, 4], [0, 6, 8], 1.0, 1.1)
        assert barrier_1v1(s) <= 0.0
        u, v = optimal_controls(s)
        assert u.vector == pytest.approx(-1.0 * s.x_E / 5.0)
        assert v.vector == pytest.approx(-1.1 * s.x_P / 10.0)

    def test_norms_equal_speeds(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            U, V = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.5)
            if U / V > 1.0:
                continue
            s = duel(rng.uniform(-5, 5, 3), rng.uniform(-5, 5, 3), U, V)
            if np.linalg.norm(s.x_E - s.x_P) < 1e-2 or s.R_P < 1e-2:
                continue
            u, v = optimal_controls(s)
            assert u.speed == pytest.approx(U, rel=1e-12)
            assert v.speed == pytest.approx(V, rel=1e-12)


class TestValueFunctionProperties:
    def test_hji_residual_both_regions(self):
        result = check_hji_residual(np.random.default_rng(42), count=1000)
        assert result.passed, result.line()

    def test_gradients_match_finite_differences(self):
        result = check_gradients_fd(np.random.default_rng(43), count=200)
        assert result.passed, result.line()

    def test_region_pinned_evaluation_matches_checked_entry_points(self):
        s = duel([0, 0, 1], [0, 0, -1], 0.5, 1.0)
        pinned = value_for_region(s, Region.PURSUER_WINS)
        checked = value_pursuer_region(s)
        assert pinned.value == checked.value
        e = duel([0, 0, 1], [0, 0, 3], 0.5, 1.0)
        assert value_for_region(e, Region.EVADER_WINS).value == value_evader_region(e).value
