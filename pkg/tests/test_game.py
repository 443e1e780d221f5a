import numpy as np
import pytest

from reachavoid.assignment import build_payoff_matrix, pair_state
from reachavoid.core import Assignment, Player, Role, Scenario, Vec3
from reachavoid.duel import Region
from reachavoid.game import (
    Capture,
    GameOver,
    Reach,
    Team,
    classify,
    multiplayer_barrier,
    solve,
    team_controls,
    termination_check,
)
from reachavoid.geometry import apollonius_locus, closest_point_to_origin


def positions(s):
    E = np.array([e.position.as_tuple() for e in s.evaders])
    P = np.array([p.position.as_tuple() for p in s.pursuers])
    return E, P


class TestMultiplayerBarrier:
    def test_pursuer_win_barrier_positive(self, ex2):
        sol = solve(ex2)
        assert multiplayer_barrier(ex2, sol.chosen) > 0.0

    def test_evader_win_barrier_nonpositive_for_both_optima(self, ex3):
        sol = solve(ex3)
        for a in sol.gamma_star:
            assert multiplayer_barrier(ex3, a) <= 0.0

    def test_assignment_with_faster_evader_pair_is_below_minus_L(self, ex2):
        # E3 is faster than P1, so that pair carries the penalty.
        gamma = Assignment(((1, 2), (2, 3), (3, 1)))
        assert multiplayer_barrier(ex2, gamma) <= -100.0


class TestClassify:
    def test_pursuer_win(self, ex2):
        assert classify(ex2).winner is Team.PURSUERS

    def test_evader_win(self, ex3):
        assert classify(ex3).winner is Team.EVADERS

    def test_evader_on_target_wins_immediately(self):
        s = Scenario(
            evaders=(Player(1, Role.EVADER, Vec3(0, 0, 0), 1.0),),
            pursuers=(Player(1, Role.PURSUER, Vec3(1, 1, 1), 2.0),),
            penalty_L=10.0,
        )
        assert classify(s).winner is Team.EVADERS


class TestSolve:
    def test_pursuer_win_value_is_sum_of_pair_values(self, ex2):
        sol = solve(ex2)
        assert sol.winner is Team.PURSUERS
        assert sol.value == pytest.approx(
            sum(sol.payoff.a[i - 1, j - 1] for i, j in sol.chosen.pairs)
        )
        assert sol.value_certified
        assert not sol.on_dispersal_surface
        assert all(po.region is Region.PURSUER_WINS for po in sol.per_pair)

    def test_symmetric_3v2_dispersal(self, ex4):
        sol = solve(ex4)
        assert sol.winner is Team.PURSUERS
        assert len(sol.gamma_star) == 4
        assert sol.on_dispersal_surface
        assert sol.value == pytest.approx(1.54, abs=0.02)

    def test_evader_win_flags_uncertified_value(self, ex3):
        # Every optimal matching pairs the fastest evader against a slower
        # pursuer, so no certified value exists for this start.
        sol = solve(ex3)
        assert sol.winner is Team.EVADERS
        assert not sol.value_certified
        assert {a.pairs for a in sol.gamma_star} == {
            ((1, 2), (2, 1), (3, 3)),
            ((1, 3), (2, 1), (3, 2)),
        }
        assert len(sol.theta_star) == 1
        assert sol.value == pytest.approx(
            sum(sol.value_matrix.v[i - 1, j - 1] for i, j in sol.chosen.pairs)
        )

    def test_winner_agrees_across_gamma_star(self, ex4):
        sol = solve(ex4)
        signs = {multiplayer_barrier(ex4, a, payoff=sol.payoff) > 0 for a in sol.gamma_star}
        assert signs == {True}

    def test_barrier_sign_invariant_on_symmetrized_dispersal_instances(self):
        # Mirroring the two evaders across y=0 while keeping every pursuer on
        # that plane makes each matching and its evader swap equally optimal,
        # which forces a dispersal surface with at least two optima.
        rng = np.random.default_rng(71)
        for _ in range(20):
            ex = rng.uniform(-8, 8)
            ey = rng.uniform(0.5, 8)
            ez = rng.uniform(-8, 8)
            speed_E = float(rng.uniform(0.8, 1.4))
            evaders = (
                Player(1, Role.EVADER, Vec3(ex, ey, ez), speed_E),
                Player(2, Role.EVADER, Vec3(ex, -ey, ez), speed_E),
            )
            pursuers = tuple(
                Player(j, Role.PURSUER, Vec3(rng.uniform(-8, 8), 0.0, rng.uniform(-8, 8)), 2.0)
                for j in (1, 2, 3)
            )
            s = Scenario(evaders=evaders, pursuers=pursuers, penalty_L=100.0)
            sol = solve(s)
            assert len(sol.gamma_star) >= 2
            signs = {
                multiplayer_barrier(s, a, payoff=sol.payoff) > 0 for a in sol.gamma_star
            }
            assert len(signs) == 1


class TestTeamControls:
    def test_pursuer_controls_point_at_interception(self, ex2):
        sol = solve(ex2)
        E, P = positions(ex2)
        u, v = team_controls(ex2, sol.chosen, E, P)
        for i, j in sol.chosen.pairs:
            ds = pair_state(ex2, i, j)
            locus = apollonius_locus(ds.x_E, ds.x_P, ds.alpha)
            I, _ = closest_point_to_origin(locus)
            to_I = I - ds.x_P
            cross = np.cross(v[j - 1], to_I)
            assert np.linalg.norm(cross) <= 1e-9 * np.linalg.norm(to_I) * np.linalg.norm(v[j - 1])
            assert v[j - 1] @ to_I > 0.0

    def test_evader_region_pair_heads_home(self, ex3):
        sol = solve(ex3)
        E, P = positions(ex3)
        u, v = team_controls(ex3, sol.chosen, E, P)
        # E1 wins its pair: straight to the target at full speed.
        e1 = ex3.evader(1)
        expected = -e1.speed * E[0] / np.linalg.norm(E[0])
        assert u[0] == pytest.approx(expected)

    def test_frozen_players_hold(self, ex2):
        sol = solve(ex2)
        E, P = positions(ex2)
        i, j = sol.chosen.pairs[0]
        u, v = team_controls(
            ex2, sol.chosen, E, P, frozen_evaders=frozenset({i}), frozen_pursuers=frozenset({j})
        )
        assert np.all(u[i - 1] == 0.0)
        assert np.all(v[j - 1] == 0.0)

    def test_unmatched_pursuer_holds(self, ex4):
        sol = solve(ex4)
        E, P = positions(ex4)
        u, v = team_controls(ex4, sol.chosen, E, P)
        unmatched = set(range(1, 4)) - sol.chosen.matched_pursuers()
        for j in unmatched:
            assert np.all(v[j - 1] == 0.0)

    def test_speed_norms(self, ex2):
        sol = solve(ex2)
        E, P = positions(ex2)
        u, v = team_controls(ex2, sol.chosen, E, P)
        for k, e in enumerate(ex2.evaders):
            assert np.linalg.norm(u[k]) == pytest.approx(e.speed, rel=1e-12)
        for k, p in enumerate(ex2.pursuers):
            assert np.linalg.norm(v[k]) == pytest.approx(p.speed, rel=1e-12)


class TestTerminationCheck:
    def scenario(self):
        return Scenario(
            evaders=(Player(1, Role.EVADER, Vec3(0, 0, 5), 1.0),),
            pursuers=(Player(1, Role.PURSUER, Vec3(0, 0, -5), 2.0),),
            penalty_L=10.0,
        )

    def test_coincident_pair_away_from_target_is_capture(self):
        s = self.scenario()
        chosen = Assignment(((1, 1),))
        events = termination_check(s, chosen, np.array([[3.0, 0, 0]]), np.array([[3.0, 0, 0]]), 1.0)
        assert any(isinstance(e, Capture) for e in events)
        assert any(isinstance(e, GameOver) for e in events)

    def test_evader_on_target_is_reach_even_if_pursuer_arrives(self):
        s = self.scenario()
        chosen = Assignment(((1, 1),))
        events = termination_check(s, chosen, np.zeros((1, 3)), np.zeros((1, 3)), 2.0)
        kinds = {type(e) for e in events}
        assert Reach in kinds
        assert Capture not in kinds

    def test_no_proximity_no_events(self):
        s = self.scenario()
        chosen = Assignment(((1, 1),))
        E, P = np.array([[0.0, 0, 5]]), np.array([[0.0, 0, -5]])
        assert termination_check(s, chosen, E, P, 0.0) == []

    def test_resolved_evaders_are_skipped(self):
        s = self.scenario()
        chosen = Assignment(((1, 1),))
        events = termination_check(
            s, chosen, np.zeros((1, 3)), np.zeros((1, 3)), 2.0, resolved=frozenset({1})
        )
        assert events == []
