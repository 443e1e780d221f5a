"""Complete one-pursuer/one-evader reach-avoid game.

Provides the barrier that splits the pair's state space into winning
regions, the value of the game in each region with analytic gradients, and
the state-feedback controls derived from those gradients.  The target is
the origin throughout.

In the pursuer-winning region the value is the distance from the target to
the nearest point of the pair's equal-time locus; both players head to that
interception point.  In the evader-winning region the evader runs straight
home and the value is the pursuer's shortfall, ``-R_P + R_E / alpha``.

At exactly equal speeds the locus is a plane and the pursuer-region value
reduces to ``(R_E^2 - R_P^2) / (2 ||x_E - x_P||)``, the analytic limit of
the sphere formula; its gradients are obtained by direct differentiation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import (
    RegionMismatchError,
    SingularControlError,
    SingularGradientError,
    UnsupportedRegimeError,
)
from .geometry import PLANE_SWITCH, ApolloniusSphere, apollonius_locus, closest_point_to_origin

__all__ = [
    "Region",
    "DuelState",
    "DuelValue",
    "Control",
    "barrier_1v1",
    "value_pursuer_region",
    "value_evader_region",
    "value_for_region",
    "optimal_controls",
    "controls_from_value",
]


class Region(enum.Enum):
    PURSUER_WINS = "pursuer_wins"
    EVADER_WINS = "evader_wins"


@dataclass(frozen=True, eq=False)
class DuelState:
    """Positions and speeds of one evader/pursuer pair."""

    x_E: np.ndarray
    x_P: np.ndarray
    U: float
    V: float

    def __post_init__(self):
        object.__setattr__(self, "x_E", np.asarray(self.x_E, dtype=float))
        object.__setattr__(self, "x_P", np.asarray(self.x_P, dtype=float))
        if not (self.U > 0.0 and self.V > 0.0):
            raise ValueError(f"speeds must be positive, got U={self.U}, V={self.V}")

    @property
    def alpha(self) -> float:
        return self.U / self.V

    @property
    def R_E(self) -> float:
        return float(np.linalg.norm(self.x_E))

    @property
    def R_P(self) -> float:
        return float(np.linalg.norm(self.x_P))


@dataclass(frozen=True, eq=False)
class DuelValue:
    """Value of the 1v1 game at a state, with its gradients wrt both players."""

    region: Region
    value: float
    grad_E: np.ndarray
    grad_P: np.ndarray


@dataclass(frozen=True, eq=False)
class Control:
    """A velocity command; its norm is the commanded player's speed."""

    vector: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vector", np.asarray(self.vector, dtype=float))

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self.vector))


def barrier_1v1(s: DuelState) -> float:
    """``R_E^2 - alpha^2 R_P^2``; positive iff the pursuer wins the pair."""
    a = s.alpha
    return s.R_E**2 - a * a * s.R_P**2


def _require_alpha_supported(alpha: float) -> None:
    if alpha > 1.0 + PLANE_SWITCH:
        raise UnsupportedRegimeError(f"no value function exists for speed ratio {alpha} > 1")


def _pursuer_value(s: DuelState, min_separation: float) -> DuelValue:
    a = s.alpha
    if abs(1.0 - a) < PLANE_SWITCH:
        diff = s.x_E - s.x_P
        D = float(np.linalg.norm(diff))
        if D <= max(min_separation, 0.0):
            raise SingularGradientError("coincident positions: equal-speed value undefined")
        value = (s.R_E**2 - s.R_P**2) / (2.0 * D)
        grad_E = s.x_E / D - (value / D**2) * diff
        grad_P = -s.x_P / D + (value / D**2) * diff
        return DuelValue(Region.PURSUER_WINS, value, grad_E, grad_P)
    locus = apollonius_locus(s.x_E, s.x_P, a, min_separation=min_separation)
    assert isinstance(locus, ApolloniusSphere)
    _, value = closest_point_to_origin(locus)
    a2 = a * a
    one = 1.0 - a2
    center_dir = locus.center / np.linalg.norm(locus.center)
    sep_term = (s.x_E - s.x_P) / locus.radius
    grad_E = center_dir / one - (a2 / one**2) * sep_term
    grad_P = -(a2 / one) * center_dir + (a2 / one**2) * sep_term
    return DuelValue(Region.PURSUER_WINS, value, grad_E, grad_P)


def _evader_value(s: DuelState) -> DuelValue:
    a = s.alpha
    R_E, R_P = s.R_E, s.R_P
    if R_P == 0.0:
        raise SingularGradientError(
            f"pursuer is on the target: value is {R_E / a} but its gradient is undefined"
        )
    value = -R_P + R_E / a
    grad_E = (s.x_E / R_E) / a if R_E > 0.0 else np.zeros(3)
    grad_P = -s.x_P / R_P
    return DuelValue(Region.EVADER_WINS, value, grad_E, grad_P)


def value_pursuer_region(s: DuelState, *, min_separation: float = 0.0) -> DuelValue:
    """Value and gradients where the pursuer wins (barrier > 0, alpha <= 1)."""
    _require_alpha_supported(s.alpha)
    if barrier_1v1(s) <= 0.0:
        raise RegionMismatchError("state is in the evader-winning region")
    return _pursuer_value(s, min_separation)


def value_evader_region(s: DuelState) -> DuelValue:
    """Value and gradients where the evader wins (barrier <= 0, alpha <= 1).

    The evader heads straight home; the value is minus the pursuer's distance
    from the target at that arrival.  With the pursuer exactly on the target
    the value still exists but its gradient does not, which raises.
    """
    _require_alpha_supported(s.alpha)
    if barrier_1v1(s) > 0.0:
        raise RegionMismatchError("state is in the pursuer-winning region")
    return _evader_value(s)


def value_for_region(s: DuelState, region: Region, *, min_separation: float = 0.0) -> DuelValue:
    """Evaluate the named region's value function without a barrier-sign check.

    The simulator fixes each pair's region at the start of play and keeps
    evaluating that region's value function along the trajectory, where the
    instantaneous barrier sign may legitimately differ from the initial one.
    """
    _require_alpha_supported(s.alpha)
    if region is Region.PURSUER_WINS:
        return _pursuer_value(s, min_separation)
    return _evader_value(s)


def optimal_controls(s: DuelState, *, min_separation: float = 0.0) -> tuple[Control, Control]:
    """State-feedback optimal controls for both players at this state.

    The evader descends the current region's value, the pursuer ascends it;
    both commands have exactly the player's speed as norm.
    """
    if barrier_1v1(s) > 0.0:
        dv = value_pursuer_region(s, min_separation=min_separation)
    else:
        dv = value_evader_region(s)
    return controls_from_value(dv, s.U, s.V)


def controls_from_value(dv: DuelValue, U: float, V: float) -> tuple[Control, Control]:
    """Speed-normalized feedback controls from a value's gradients."""
    rho_E = float(np.linalg.norm(dv.grad_E))
    rho_P = float(np.linalg.norm(dv.grad_P))
    if rho_E == 0.0 or rho_P == 0.0:
        raise SingularControlError("zero-norm value gradient; no feedback direction")
    u_E = Control(-(U / rho_E) * dv.grad_E)
    v_P = Control((V / rho_P) * dv.grad_P)
    return u_E, v_P
