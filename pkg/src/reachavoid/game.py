"""Multiplayer game: team winning regions, game value, and team controls.

The winner is decided by the sign of the barrier induced by any optimal
assignment: the smallest per-pair payoff under that matching.  A positive
barrier means every matched pursuer can win its pair, so the pursuer team
wins; otherwise at least one evader gets home under every assignment.

The game value separates over the matched pairs: the payoff-matrix sum in
the pursuer region, the refined value-matrix sum in the evader region.  A
value in the evader region is only certified when no chosen pair puts a
faster evader against its pursuer; those pairs have no 1v1 value function.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .assignment import (
    OptimalAssignmentSet,
    PayoffMatrix,
    ValueMatrix,
    build_payoff_matrix,
    build_value_matrix,
    enumerate_optimal_set,
    pair_region,
    pair_state,
    refine_theta_star,
    team_payoff,
)
from .core import Assignment, DegenerateGeometryError, Scenario, SingularGradientError
from .duel import Control, DuelState, Region, controls_from_value, value_for_region
from .geometry import PLANE_SWITCH

__all__ = [
    "Team",
    "PairOutcome",
    "GameSolution",
    "Capture",
    "Reach",
    "GameOver",
    "Event",
    "multiplayer_barrier",
    "classify",
    "solve",
    "team_controls",
    "termination_check",
]


class Team(enum.Enum):
    PURSUERS = "pursuers"
    EVADERS = "evaders"


@dataclass(frozen=True)
class PairOutcome:
    """Initial-state diagnosis of one matched pair."""

    i: int
    j: int
    region: Region
    pair_value: float
    alpha: float


@dataclass(frozen=True, eq=False)
class GameSolution:
    """Winner, barrier, optimal assignment sets, and the game value."""

    winner: Team
    barrier_value: float
    gamma_star: OptimalAssignmentSet
    theta_star: OptimalAssignmentSet
    value: float
    value_certified: bool
    on_dispersal_surface: bool
    per_pair: tuple[PairOutcome, ...]
    payoff: PayoffMatrix
    value_matrix: ValueMatrix

    @property
    def chosen(self) -> Assignment:
        """Deterministic assignment pick: lexicographically first refined member."""
        return self.theta_star.first()


# ---------------------------------------------------------------------------
# Termination events


@dataclass(frozen=True)
class Capture:
    i: int
    j: int
    t: float
    point: tuple[float, float, float]


@dataclass(frozen=True)
class Reach:
    i: int
    t: float


@dataclass(frozen=True)
class GameOver:
    t: float


Event = Union[Capture, Reach, GameOver]


def multiplayer_barrier(
    s: Scenario, gamma: Assignment, payoff: Optional[PayoffMatrix] = None
) -> float:
    """Smallest per-pair payoff under ``gamma``; its sign names the winner."""
    gamma.require_covers(s.m, s.n)
    p = payoff if payoff is not None else build_payoff_matrix(s)
    return min(float(p.a[i - 1, j - 1]) for i, j in gamma.pairs)


def solve(s: Scenario) -> GameSolution:
    """Full solution: winner, optimal assignment sets, and game value."""
    s.require_valid()
    p = build_payoff_matrix(s)
    v = build_value_matrix(s)
    gamma = enumerate_optimal_set(p, s.tie_tolerance)
    barrier = multiplayer_barrier(s, gamma.first(), payoff=p)
    winner = Team.PURSUERS if barrier > 0.0 else Team.EVADERS
    theta = refine_theta_star(gamma, v, s.tie_tolerance)
    chosen = theta.first()
    if winner is Team.PURSUERS:
        value = team_payoff(p, chosen)
        certified = True
        dispersal = len(gamma) > 1
    else:
        value = float(sum(v.v[i - 1, j - 1] for i, j in chosen.pairs))
        certified = all(_pair_alpha(s, i, j) <= 1.0 + PLANE_SWITCH for i, j in chosen.pairs)
        dispersal = len(theta) > 1
    per_pair = tuple(
        PairOutcome(
            i,
            j,
            region=pair_region(s, i, j),
            pair_value=float(v.v[i - 1, j - 1]),
            alpha=_pair_alpha(s, i, j),
        )
        for i, j in chosen.pairs
    )
    return GameSolution(
        winner=winner,
        barrier_value=barrier,
        gamma_star=gamma,
        theta_star=theta,
        value=value,
        value_certified=certified,
        on_dispersal_surface=dispersal,
        per_pair=per_pair,
        payoff=p,
        value_matrix=v,
    )


def classify(s: Scenario) -> GameSolution:
    """Winning-team classification; a convenience alias for :func:`solve`.

    The barrier sign is identical across the optimal set, so evaluating it
    for the first member decides the winner for all of them.
    """
    return solve(s)


def _pair_alpha(s: Scenario, i: int, j: int) -> float:
    return s.evader(i).speed / s.pursuer(j).speed


def _straight_home(position: np.ndarray, speed: float, stop_radius: float) -> np.ndarray:
    r = float(np.linalg.norm(position))
    if r <= stop_radius or r == 0.0:
        return np.zeros(3)
    return -speed * position / r


def team_controls(
    s: Scenario,
    chosen: Assignment,
    E_pos: np.ndarray,
    P_pos: np.ndarray,
    frozen_evaders: frozenset[int] = frozenset(),
    frozen_pursuers: frozenset[int] = frozenset(),
) -> tuple[np.ndarray, np.ndarray]:
    """Per-player velocity commands at the given live positions.

    Each matched pair plays the feedback law of the region it started the
    game in; the region label never changes mid-game.  Pairs with a faster
    evader have no value function and both players head straight for the
    target instead.  Frozen players and unmatched pursuers hold position.
    """
    chosen.require_covers(s.m, s.n)
    u = np.zeros((s.m, 3))
    v = np.zeros((s.n, 3))
    for i, j in chosen.pairs:
        if i in frozen_evaders or j in frozen_pursuers:
            continue
        e, p = s.evader(i), s.pursuer(j)
        xE = np.asarray(E_pos[i - 1], dtype=float)
        xP = np.asarray(P_pos[j - 1], dtype=float)
        alpha = e.speed / p.speed
        if alpha > 1.0 + PLANE_SWITCH:
            u[i - 1] = _straight_home(xE, e.speed, s.target_radius)
            v[j - 1] = _straight_home(xP, p.speed, s.target_radius)
            continue
        region = pair_region(s, i, j)
        ds = DuelState(xE, xP, e.speed, p.speed)
        if region is Region.PURSUER_WINS and float(np.linalg.norm(xE - xP)) <= s.capture_radius:
            continue  # capture is due; both stop
        if region is Region.EVADER_WINS and float(np.linalg.norm(xE)) <= s.target_radius:
            continue  # the evader is home; the pair is resolved
        try:
            dv = value_for_region(ds, region)
            cu, cv = controls_from_value(dv, e.speed, p.speed)
        except (SingularGradientError, DegenerateGeometryError):
            if region is Region.EVADER_WINS:
                # Pursuer on the target: it holds, the evader still runs home.
                u[i - 1] = _straight_home(xE, e.speed, s.target_radius)
                continue
            raise
        u[i - 1] = cu.vector
        v[j - 1] = cv.vector
    return u, v


def termination_check(
    s: Scenario,
    chosen: Assignment,
    E_pos: np.ndarray,
    P_pos: np.ndarray,
    t: float,
    resolved: frozenset[int] = frozenset(),
) -> list[Event]:
    """Events due at the given positions: reaches, captures, and game over.

    A reach outranks a simultaneous capture: an evader on the target renders
    it unsafe even if its pursuer arrives in the same instant.  Game over is
    emitted by the call that resolves the last outstanding evader.
    """
    events: list[Event] = []
    newly: set[int] = set()
    for i, j in sorted(chosen.pairs):
        if i in resolved:
            continue
        xE = np.asarray(E_pos[i - 1], dtype=float)
        xP = np.asarray(P_pos[j - 1], dtype=float)
        if float(np.linalg.norm(xE)) <= s.target_radius:
            events.append(Reach(i=i, t=t))
            newly.add(i)
        elif float(np.linalg.norm(xP - xE)) <= s.capture_radius:
            point = 0.5 * (xE + xP)
            events.append(Capture(i=i, j=j, t=t, point=tuple(float(c) for c in point)))
            newly.add(i)
    if newly and resolved | newly == {i for i, _ in chosen.pairs}:
        events.append(GameOver(t=t))
    return events
