"""Event-driven trajectory simulation under closed-loop strategies.

Fixed-step forward-Euler integration with within-step event refinement:
between control updates every player moves in a straight line, so each
step is integrated exactly and capture/reach crossings are pinned by
bisection along the step.  Captured or arrived players freeze, together
with their partner, and the run ends once every evader is resolved.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .core import (
    Assignment,
    IntegrationDivergedError,
    NoTerminationError,
    Scenario,
)
from .duel import Region
from .assignment import pair_region
from .game import Capture, Event, GameOver, Reach, team_controls, termination_check

__all__ = [
    "EvaderPolicy",
    "PursuerPolicy",
    "StrategyProfile",
    "Trajectory",
    "simulate",
    "straightness_check",
    "value_conservation_check",
    "default_step",
]

ControlHook = Callable[[float, np.ndarray, np.ndarray], np.ndarray]


class EvaderPolicy(enum.Enum):
    OPTIMAL = "optimal"
    STRAIGHT_TO_TARGET = "straight"


class PursuerPolicy(enum.Enum):
    OPTIMAL = "optimal"


@dataclass(frozen=True)
class StrategyProfile:
    """Team strategy selectors; callables receive (t, E_pos, P_pos)."""

    evaders: Union[EvaderPolicy, ControlHook] = EvaderPolicy.OPTIMAL
    pursuers: Union[PursuerPolicy, ControlHook] = PursuerPolicy.OPTIMAL


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-stamped positions of all players plus the event log."""

    times: np.ndarray
    E_positions: np.ndarray  # (steps, m, 3)
    P_positions: np.ndarray  # (steps, n, 3)
    events: tuple[Event, ...]
    realized_payoff: float
    t_f: float
    scenario: Scenario
    chosen: Assignment

    @property
    def final_E(self) -> np.ndarray:
        return self.E_positions[-1]

    @property
    def final_P(self) -> np.ndarray:
        return self.P_positions[-1]


def default_step(s: Scenario) -> float:
    """About a thousand steps per characteristic crossing of the arena."""
    max_speed = max(p.speed for p in s.evaders + s.pursuers)
    return 1e-3 * s.max_pairwise_distance / max_speed


def _max_time(s: Scenario) -> float:
    min_speed = min(p.speed for p in s.evaders + s.pursuers)
    return 10.0 * s.max_pairwise_distance / min_speed


def _straight_rows(positions: np.ndarray, speeds: np.ndarray, stop: float) -> np.ndarray:
    out = np.zeros_like(positions)
    for k, pos in enumerate(positions):
        r = float(np.linalg.norm(pos))
        if r > stop:
            out[k] = -speeds[k] * pos / r
    return out


def _check_admissible(controls: np.ndarray, speeds: np.ndarray, team: str) -> None:
    for k, row in enumerate(controls):
        norm = float(np.linalg.norm(row))
        if norm != 0.0 and abs(norm - speeds[k]) > 1e-9 * max(1.0, speeds[k]):
            raise ValueError(
                f"{team} control {k + 1} has norm {norm}, expected 0 or the speed {speeds[k]}"
            )


def simulate(
    s: Scenario,
    chosen: Assignment,
    profile: StrategyProfile = StrategyProfile(),
    step: Optional[float] = None,
    max_time: Optional[float] = None,
) -> Trajectory:
    """Integrate the game under the given strategy profile until termination.

    Controls are re-evaluated every step (state-feedback form).  The run
    continues past the formal first-reach instant until every pair has
    resolved, so the realized cost of each pair can be booked.
    """
    s.require_valid()
    chosen.require_covers(s.m, s.n)
    dt = default_step(s) if step is None else float(step)
    if dt <= 0.0:
        raise ValueError(f"step must be positive, got {dt}")
    horizon = _max_time(s) if max_time is None else float(max_time)

    m, n = s.m, s.n
    E = np.array([e.position.as_tuple() for e in s.evaders], dtype=float)
    P = np.array([p.position.as_tuple() for p in s.pursuers], dtype=float)
    U = np.array([e.speed for e in s.evaders])
    V = np.array([p.speed for p in s.pursuers])
    pursuer_of = {i: j for i, j in chosen.pairs}

    times = [0.0]
    E_hist = [E.copy()]
    P_hist = [P.copy()]
    events: list[Event] = []
    resolved: frozenset[int] = frozenset()
    frozen_E: frozenset[int] = frozenset()
    frozen_P: frozenset[int] = frozenset()
    t = 0.0
    game_over = False

    def fire(due: list[Event]) -> None:
        nonlocal resolved, frozen_E, frozen_P, game_over
        for ev in due:
            events.append(ev)
            if isinstance(ev, Reach):
                resolved |= {ev.i}
                frozen_E |= {ev.i}
                if pursuer_of.get(ev.i) is not None:
                    frozen_P |= {pursuer_of[ev.i]}
            elif isinstance(ev, Capture):
                resolved |= {ev.i}
                frozen_E |= {ev.i}
                frozen_P |= {ev.j}
            elif isinstance(ev, GameOver):
                game_over = True

    fire(termination_check(s, chosen, E, P, t, resolved))
    closing_bound = float(U.max() + V.max())

    while not game_over:
        if t >= horizon:
            raise NoTerminationError(
                f"no termination within the {horizon:.3g} s cap; state may be non-terminating"
            )
        u, v = _controls(s, chosen, profile, t, E, P, U, V, frozen_E, frozen_P)
        # Refine the step inside the event boundary layer: close-range
        # feedback rotates on the gap's own timescale, and a fixed step
        # there lets the integration skate past the capture shell.
        gap = _min_event_gap(s, chosen, E, P, resolved)
        dt_k = dt if gap is None else min(dt, max(0.5 * gap / closing_bound, 1e-6 * dt))
        # Earliest event crossing within the step, if any.
        tau = _first_crossing(s, chosen, E, P, u, v, dt_k, resolved)
        advance = dt_k if tau is None else tau
        if advance > 0.0:
            E = E + advance * u
            P = P + advance * v
            t += advance
            if not (np.all(np.isfinite(E)) and np.all(np.isfinite(P))):
                raise IntegrationDivergedError(f"state became non-finite at t={t}")
            times.append(t)
            E_hist.append(E.copy())
            P_hist.append(P.copy())
        if tau is not None:
            fire(termination_check(s, chosen, E, P, t, resolved))

    realized = _realized_payoff(s, chosen, E_hist, P_hist, events)
    return Trajectory(
        times=np.array(times),
        E_positions=np.array(E_hist),
        P_positions=np.array(P_hist),
        events=tuple(events),
        realized_payoff=realized,
        t_f=events[-1].t if events else t,
        scenario=s,
        chosen=chosen,
    )


def _controls(s, chosen, profile, t, E, P, U, V, frozen_E, frozen_P):
    need_optimal = profile.evaders is EvaderPolicy.OPTIMAL or profile.pursuers is PursuerPolicy.OPTIMAL
    u_opt = v_opt = None
    if need_optimal:
        u_opt, v_opt = team_controls(s, chosen, E, P, frozen_E, frozen_P)

    if profile.evaders is EvaderPolicy.OPTIMAL:
        u = u_opt
    elif profile.evaders is EvaderPolicy.STRAIGHT_TO_TARGET:
        u = _straight_rows(E, U, s.target_radius)
    else:
        u = np.asarray(profile.evaders(t, E, P), dtype=float)
        _check_admissible(u, U, "evader")

    if profile.pursuers is PursuerPolicy.OPTIMAL:
        v = v_opt
    else:
        v = np.asarray(profile.pursuers(t, E, P), dtype=float)
        _check_admissible(v, V, "pursuer")

    u = u.copy()
    v = v.copy()
    for i in frozen_E:
        u[i - 1] = 0.0
    for j in frozen_P:
        v[j - 1] = 0.0
    return u, v


def _min_event_gap(s, chosen, E, P, resolved) -> Optional[float]:
    """Smallest distance-to-event over unresolved pairs, or None if all resolved."""
    gaps = []
    for i, j in chosen.pairs:
        if i in resolved:
            continue
        gaps.append(float(np.linalg.norm(E[i - 1])) - s.target_radius)
        gaps.append(float(np.linalg.norm(P[j - 1] - E[i - 1])) - s.capture_radius)
    if not gaps:
        return None
    return max(min(gaps), 0.0)


def _first_crossing(s, chosen, E, P, u, v, dt, resolved) -> Optional[float]:
    """Earliest in-step time at which a reach or capture condition is met.

    Within a step every player moves in a straight line, so each squared
    event distance is an exact quadratic in the in-step time.  Its vertex
    brackets dips that start and end above the threshold (e.g. both players
    sweeping through the interception point mid-step); the crossing is then
    pinned by bisection on the bracket.
    """
    scale = max(s.max_pairwise_distance, 1.0)
    speed = max(max(e.speed for e in s.evaders), max(p.speed for p in s.pursuers))
    tol = 1e-12 * scale / speed

    def bracket_and_bisect(x0: np.ndarray, w: np.ndarray, radius: float) -> Optional[float]:
        def gap(tau: float) -> float:
            return float(np.linalg.norm(x0 + tau * w)) - radius

        if gap(0.0) <= 0.0:
            return 0.0
        ww = float(w @ w)
        vertex = -float(x0 @ w) / ww if ww > 0.0 else math.inf
        hi = None
        if 0.0 < vertex < dt and gap(vertex) <= 0.0:
            hi = vertex
        elif gap(dt) <= 0.0:
            hi = dt
        if hi is None:
            return None
        lo = 0.0
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if gap(mid) <= 0.0:
                hi = mid
            else:
                lo = mid
        return hi

    best: Optional[float] = None
    for i, j in chosen.pairs:
        if i in resolved:
            continue
        for x0, w, radius in (
            (E[i - 1], u[i - 1], s.target_radius),
            (E[i - 1] - P[j - 1], u[i - 1] - v[j - 1], s.capture_radius),
        ):
            tau = bracket_and_bisect(np.asarray(x0, float), np.asarray(w, float), radius)
            if tau is not None and (best is None or tau < best):
                best = tau
    return best


def _realized_payoff(s, chosen, E_hist, P_hist, events) -> float:
    """Book the realized cost from the terminal positions of each pair.

    In a pursuer-won game this is the summed distance of the evaders'
    capture points from the target.  In an evader-won game each winning
    evader books minus its pursuer's distance at the reach instant, while
    captured pairs still book their capture distance.
    """
    E_final = E_hist[-1]
    P_final = P_hist[-1]
    pursuer_won_game = all(
        pair_region(s, i, j) is Region.PURSUER_WINS
        and s.evader(i).speed / s.pursuer(j).speed <= 1.0 + 1e-9
        for i, j in chosen.pairs
    )
    if pursuer_won_game:
        return float(sum(np.linalg.norm(E_final[i - 1]) for i, _ in chosen.pairs))
    total = 0.0
    reached = {ev.i for ev in events if isinstance(ev, Reach)}
    for i, j in chosen.pairs:
        if i in reached:
            total -= float(np.linalg.norm(P_final[j - 1]))
        else:
            total += float(np.linalg.norm(E_final[i - 1]))
    return total


def straightness_check(traj: Trajectory) -> dict[str, float]:
    """Largest chord deviation of each player, normalized by chord length.

    Optimal headings are constant, so optimal trajectories are straight
    lines; deviations beyond integrator noise flag a broken feedback law.
    Stationary players (zero-length chord) report zero.
    """
    out: dict[str, float] = {}
    s = traj.scenario
    for label, series in _player_series(traj):
        start, end = series[0], series[-1]
        chord = end - start
        length = float(np.linalg.norm(chord))
        if length < 1e-12 * max(1.0, s.max_pairwise_distance):
            out[label] = 0.0
            continue
        direction = chord / length
        rel = series - start
        along = rel @ direction
        perp = rel - np.outer(along, direction)
        out[label] = float(np.max(np.linalg.norm(perp, axis=1))) / length
    return out


def _player_series(traj: Trajectory):
    s = traj.scenario
    for k, e in enumerate(s.evaders):
        yield f"E{e.id}", traj.E_positions[:, k, :]
    for k, p in enumerate(s.pursuers):
        yield f"P{p.id}", traj.P_positions[:, k, :]


def value_conservation_check(
    s: Scenario,
    chosen: Assignment,
    step: Optional[float] = None,
) -> float:
    """Max drift of the game value along optimal play, over the full run.

    The summed per-pair value (with each pair's region and penalty branch
    fixed at the start, and resolved pairs holding their value at the
    resolution instant) is constant along optimal trajectories; the returned
    drift is integrator plus event-quantization error.
    """
    from .assignment import build_value_matrix  # local import to avoid cycle at module load

    traj = simulate(s, chosen, StrategyProfile(), step=step)
    vmat = build_value_matrix(s)
    series = _pair_value_series(s, chosen, traj, vmat)
    totals = series.sum(axis=1)
    return float(np.max(np.abs(totals - totals[0])))


def _pair_value_series(s, chosen, traj, vmat) -> np.ndarray:
    """Per-sample, per-pair value with branches fixed at t=0 and freezing at events."""
    from .core import DegenerateGeometryError, SingularGradientError
    from .duel import DuelState, value_for_region

    steps = len(traj.times)
    pairs = sorted(chosen.pairs)
    values = np.zeros((steps, len(pairs)))
    event_time: dict[int, float] = {}
    for ev in traj.events:
        if isinstance(ev, (Reach, Capture)):
            event_time[ev.i] = ev.t
    for col, (i, j) in enumerate(pairs):
        e, p = s.evader(i), s.pursuer(j)
        alpha = e.speed / p.speed
        if alpha > 1.0 + 1e-9:
            values[:, col] = vmat.v[i - 1, j - 1]  # constant penalty branch
            continue
        region = pair_region(s, i, j)
        t_res = event_time.get(i, math.inf)
        frozen_value: Optional[float] = None
        for k in range(steps):
            t = traj.times[k]
            if frozen_value is not None:
                values[k, col] = frozen_value
                continue
            xE = traj.E_positions[k, i - 1]
            xP = traj.P_positions[k, j - 1]
            try:
                val = value_for_region(DuelState(xE, xP, e.speed, p.speed), region).value
            except DegenerateGeometryError:
                val = float(np.linalg.norm(0.5 * (xE + xP)))  # locus collapsed at capture
            except SingularGradientError:
                val = float(np.linalg.norm(xE)) / alpha  # pursuer exactly on the target
            values[k, col] = val
            if t >= t_res:
                frozen_value = val
    return values
