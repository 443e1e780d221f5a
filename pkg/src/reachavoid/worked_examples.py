"""Built-in 3v3 and 3v2 demonstration scenarios used by tests and docs.

Positions and speeds are transcribed from the published worked examples
this package reproduces; see the JSON fixtures under ``scenarios/`` for the
file-format counterparts.
"""

from __future__ import annotations

import numpy as np

from .core import Player, Role, Scenario, Vec3


def _team(role: Role, entries: list[tuple[tuple[float, float, float], float]]) -> tuple[Player, ...]:
    return tuple(
        Player(id=k + 1, role=role, position=Vec3.of(pos), speed=speed)
        for k, (pos, speed) in enumerate(entries)
    )


def pursuer_win_3v3(penalty_L: float = 100.0) -> Scenario:
    """Three fast pursuers vs three evaders; the pursuing team wins."""
    return Scenario(
        evaders=_team(
            Role.EVADER,
            [
                ((4.92, -7.91, 4.43), 1.69),
                ((-8.07, 2.73, -5.91), 1.01),
                ((-6.73, -10.65, -12.49), 1.84),
            ],
        ),
        pursuers=_team(
            Role.PURSUER,
            [
                ((-6.77, -2.95, 0.01), 1.71),
                ((-3.34, -3.96, -3.33), 2.23),
                ((4.76, -13.35, -0.61), 2.28),
            ],
        ),
        penalty_L=penalty_L,
    )


def evader_win_3v3(penalty_L: float = 100.0) -> Scenario:
    """Only one pursuer can win its pair; the evading team wins."""
    return Scenario(
        evaders=_team(
            Role.EVADER,
            [
                ((-1.57, -6.23, 1.67), 1.41),
                ((0.38, -11.65, 2.24), 1.75),
                ((4.79, -4.71, 2.68), 1.83),
            ],
        ),
        pursuers=_team(
            Role.PURSUER,
            [
                ((0.38, -7.06, 1.17), 2.09),
                ((0.10, -7.45, -10.68), 1.65),
                ((0.80, 3.98, -8.45), 1.69),
            ],
        ),
        penalty_L=penalty_L,
    )


def dispersal_3v2(penalty_L: float = 100.0) -> Scenario:
    """Symmetric 3-pursuer/2-evader start with four equally optimal matchings."""
    return Scenario(
        evaders=_team(
            Role.EVADER,
            [
                ((0.75, 1.0, 0.0), 0.5),
                ((0.75, -1.0, 0.0), 0.5),
            ],
        ),
        pursuers=_team(
            Role.PURSUER,
            [
                ((1.0, 0.0, 0.0), 1.0),
                ((1.0, 0.0, 0.5), 1.0),
                ((1.0, 0.0, -0.5), 1.0),
            ],
        ),
        penalty_L=penalty_L,
    )


def tied_payoff_matrix() -> np.ndarray:
    """3x3 payoff matrix with exactly two optimal assignments."""
    return np.array(
        [
            [3.23, 1.34, 2.21],
            [3.66, 1.77, 1.67],
            [2.89, 3.24, 9.56],
        ]
    )
