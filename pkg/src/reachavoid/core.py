"""Domain model shared by every module: players, scenarios, assignments.

All types are immutable value objects. A Scenario is never mutated after
validation, so solver and simulator results are pure functions of it.
Player indices are 1-based everywhere they face the user, matching the
usual i-for-evader / j-for-pursuer convention of the assignment matrices.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

__all__ = [
    "Vec3",
    "Role",
    "Player",
    "Scenario",
    "Assignment",
    "SpeedRatio",
    "speed_ratio",
    "validate_scenario",
    "ReachAvoidError",
    "InvalidScenarioError",
    "InvalidAssignmentError",
    "UnsupportedRegimeError",
    "DegenerateGeometryError",
    "RegionMismatchError",
    "SingularGradientError",
    "SingularControlError",
    "BruteForceCapError",
    "IntegrationDivergedError",
    "NoTerminationError",
    "DEFAULT_TIE_TOLERANCE",
    "DEFAULT_RADIUS_SCALE",
]

# Relative tolerance used whenever two payoffs are compared for equality
# (dispersal-surface detection).
DEFAULT_TIE_TOLERANCE = 1e-9

# Capture/target radii default to this fraction of the largest pairwise
# initial distance; exact state coincidence never occurs under finite-step
# numerics, and a scale-relative radius keeps behavior unit-independent.
DEFAULT_RADIUS_SCALE = 1e-6


class ReachAvoidError(Exception):
    """Base class for all errors raised by this package."""


class InvalidScenarioError(ReachAvoidError):
    """A scenario violates one or more of its invariants."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class InvalidAssignmentError(ReachAvoidError):
    """A pair set violates the row/column constraints of a feasible assignment."""


class UnsupportedRegimeError(ReachAvoidError):
    """Requested a quantity that only exists for speed ratios <= 1."""


class DegenerateGeometryError(ReachAvoidError):
    """Evader and pursuer positions coincide; the equal-time locus is undefined."""


class RegionMismatchError(ReachAvoidError):
    """Asked for a winning-region quantity while the state is in the other region."""


class SingularGradientError(ReachAvoidError):
    """The value gradient is undefined at this state (e.g. pursuer on the target)."""


class SingularControlError(ReachAvoidError):
    """A feedback control cannot be normalized (zero-norm gradient)."""


class BruteForceCapError(ReachAvoidError):
    """The exhaustive assignment enumeration would exceed its configured cap."""


class IntegrationDivergedError(ReachAvoidError):
    """The simulated state became non-finite."""


class NoTerminationError(ReachAvoidError):
    """Simulation hit the max-time cap without reaching a terminal state."""


@dataclass(frozen=True)
class Vec3:
    """A point or direction in 3D Euclidean space (meters)."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"Vec3 component {name}={v!r} is not finite")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    @classmethod
    def of(cls, xyz: Iterable[float]) -> "Vec3":
        x, y, z = (float(c) for c in xyz)
        return cls(x, y, z)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


class Role(enum.Enum):
    PURSUER = "pursuer"
    EVADER = "evader"


@dataclass(frozen=True)
class Player:
    """One agent: 1-based id within its team, role, initial position, speed."""

    id: int
    role: Role
    position: Vec3
    speed: float


@dataclass(frozen=True)
class SpeedRatio:
    """Evader speed over pursuer speed for one matchable pair."""

    alpha: float

    def __post_init__(self):
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise InvalidScenarioError([f"speed ratio must be positive and finite, got {self.alpha!r}"])

    def __float__(self) -> float:
        return self.alpha


def speed_ratio(evader: Player, pursuer: Player) -> SpeedRatio:
    """Ratio of the evader's speed to the pursuer's speed."""
    if not (evader.speed > 0.0):
        raise InvalidScenarioError([f"evader {evader.id} speed must be positive, got {evader.speed!r}"])
    if not (pursuer.speed > 0.0):
        raise InvalidScenarioError([f"pursuer {pursuer.id} speed must be positive, got {pursuer.speed!r}"])
    return SpeedRatio(evader.speed / pursuer.speed)


@dataclass(frozen=True)
class Scenario:
    """One game instance: teams, penalty, tolerances. Target fixed at the origin.

    ``penalty_L`` and the radii may be omitted (None); the resolved values are
    available through :meth:`resolved_penalty` computed per instance and the
    ``capture_radius``/``target_radius`` cached properties.
    """

    evaders: tuple[Player, ...]
    pursuers: tuple[Player, ...]
    penalty_L: Optional[float] = None
    capture_radius_override: Optional[float] = None
    target_radius_override: Optional[float] = None
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "evaders", tuple(self.evaders))
        object.__setattr__(self, "pursuers", tuple(self.pursuers))

    @property
    def m(self) -> int:
        return len(self.evaders)

    @property
    def n(self) -> int:
        return len(self.pursuers)

    @cached_property
    def max_pairwise_distance(self) -> float:
        players = [p.position for p in self.evaders + self.pursuers]
        best = 0.0
        for a in range(len(players)):
            for b in range(a + 1, len(players)):
                pa, pb = players[a], players[b]
                d = math.dist(pa.as_tuple(), pb.as_tuple())
                best = max(best, d)
        return best

    @cached_property
    def capture_radius(self) -> float:
        if self.capture_radius_override is not None:
            return self.capture_radius_override
        return DEFAULT_RADIUS_SCALE * self.max_pairwise_distance

    @cached_property
    def target_radius(self) -> float:
        if self.target_radius_override is not None:
            return self.target_radius_override
        return self.capture_radius

    def evader(self, i: int) -> Player:
        """Evader with 1-based index ``i``."""
        return self.evaders[i - 1]

    def pursuer(self, j: int) -> Player:
        """Pursuer with 1-based index ``j``."""
        return self.pursuers[j - 1]

    def require_valid(self) -> "Scenario":
        problems = validate_scenario(self)
        if problems:
            raise InvalidScenarioError(problems)
        return self


def validate_scenario(s: Scenario) -> list[str]:
    """Check every scenario invariant; return a list naming each violation.

    Never raises: an empty list means the scenario is valid.
    """
    problems: list[str] = []
    m, n = s.m, s.n
    if m < 1:
        problems.append("at least one evader is required (m >= 1)")
    if n < m:
        problems.append(f"n >= m violated: {n} pursuers for {m} evaders")
    for team, role in ((s.evaders, Role.EVADER), (s.pursuers, Role.PURSUER)):
        seen: set[int] = set()
        for p in team:
            label = f"{role.value} {p.id}"
            if p.role is not role:
                problems.append(f"{label} is listed on the wrong team")
            if p.id in seen:
                problems.append(f"duplicate {role.value} id {p.id}")
            seen.add(p.id)
            if not (p.speed > 0.0 and math.isfinite(p.speed)):
                problems.append(f"{label}: speed must be positive, got {p.speed!r}")
    if s.penalty_L is not None and not (s.penalty_L > 0.0 and math.isfinite(s.penalty_L)):
        problems.append(f"penalty_L must be positive, got {s.penalty_L!r}")
    if not (s.tie_tolerance > 0.0):
        problems.append(f"tie_tolerance must be positive, got {s.tie_tolerance!r}")
    for name, radius in (("capture_radius", s.capture_radius_override), ("target_radius", s.target_radius_override)):
        if radius is not None and radius < 0.0:
            problems.append(f"{name} must be nonnegative, got {radius!r}")
    return problems


@dataclass(frozen=True)
class Assignment:
    """A feasible matching of evaders to pursuers, as 1-based (i, j) pairs.

    Every evader appears at most once and every pursuer at most once;
    completeness against a particular (m, n) game is checked by
    :meth:`require_covers`.
    """

    pairs: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        pairs = tuple(sorted((int(i), int(j)) for i, j in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        evaders = [i for i, _ in pairs]
        pursuers = [j for _, j in pairs]
        if len(set(evaders)) != len(evaders):
            raise InvalidAssignmentError(f"an evader is matched more than once in {pairs}")
        if len(set(pursuers)) != len(pursuers):
            raise InvalidAssignmentError(f"a pursuer is matched more than once in {pairs}")
        if any(i < 1 or j < 1 for i, j in pairs):
            raise InvalidAssignmentError(f"indices are 1-based, got {pairs}")

    def pursuer_for(self, i: int) -> Optional[int]:
        for ei, pj in self.pairs:
            if ei == i:
                return pj
        return None

    def matched_pursuers(self) -> set[int]:
        return {j for _, j in self.pairs}

    def is_feasible(self, m: int, n: int) -> bool:
        rows = {i for i, _ in self.pairs}
        return rows == set(range(1, m + 1)) and all(1 <= j <= n for _, j in self.pairs)

    def require_covers(self, m: int, n: int) -> "Assignment":
        if not self.is_feasible(m, n):
            raise InvalidAssignmentError(
                f"{self} is not a feasible assignment for m={m} evaders, n={n} pursuers"
            )
        return self

    def __str__(self) -> str:
        if all(i <= 9 and j <= 9 for i, j in self.pairs):
            return "{" + ",".join(f"{i}{j}" for i, j in self.pairs) + "}"
        return "{" + ",".join(f"({i},{j})" for i, j in self.pairs) + "}"
