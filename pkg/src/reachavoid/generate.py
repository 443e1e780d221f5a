"""Seeded random scenarios and payoff matrices for benchmarks and property suites."""

from __future__ import annotations

import numpy as np

from .assignment import PayoffMatrix
from .core import Player, Role, Scenario, Vec3

__all__ = ["random_scenario", "random_payoff_matrix"]

# Magnitudes chosen to match the worked examples and to yield a healthy mix
# of winnable and unwinnable pairs.
POSITION_BOX = 15.0
PURSUER_SPEED_RANGE = (1.5, 2.5)
EVADER_SPEED_RANGE = (0.8, 2.0)


def random_scenario(
    rng: np.random.Generator,
    n: int,
    m: int,
    penalty_L: float | None = None,
) -> Scenario:
    """Uniform positions in a cube and uniform speeds per team."""

    def players(count: int, role: Role, speed_range: tuple[float, float]) -> tuple[Player, ...]:
        positions = rng.uniform(-POSITION_BOX, POSITION_BOX, size=(count, 3))
        speeds = rng.uniform(*speed_range, size=count)
        return tuple(
            Player(id=k + 1, role=role, position=Vec3.of(positions[k]), speed=float(speeds[k]))
            for k in range(count)
        )

    return Scenario(
        evaders=players(m, Role.EVADER, EVADER_SPEED_RANGE),
        pursuers=players(n, Role.PURSUER, PURSUER_SPEED_RANGE),
        penalty_L=penalty_L,
    )


def random_payoff_matrix(
    rng: np.random.Generator, m: int, n: int, L: float = 10.0
) -> PayoffMatrix:
    """Entries uniform in [-L, L]; exercises solvers away from game geometry."""
    return PayoffMatrix(a=rng.uniform(-L, L, size=(m, n)), L_used=L)
