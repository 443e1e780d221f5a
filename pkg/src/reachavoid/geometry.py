"""Equal-time loci for a pursuer/evader pair and closest-point queries.

For an evader slower than its pursuer (speed ratio < 1) the set of points
both can reach simultaneously is a sphere; at equal speeds it degenerates
into the perpendicular bisector plane of the segment joining them.  The
sphere's center and radius diverge as the ratio approaches 1, so the plane
is kept as a separate variant and used whenever ``|1 - alpha| < PLANE_SWITCH``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import (
    DegenerateGeometryError,
    RegionMismatchError,
    SpeedRatio,
    UnsupportedRegimeError,
)

__all__ = [
    "ApolloniusSphere",
    "BisectorPlane",
    "ApolloniusLocus",
    "apollonius_locus",
    "closest_point_to_origin",
    "fibonacci_sphere_points",
    "sample_locus",
    "PLANE_SWITCH",
]

# Numerical switchover to the plane variant.
PLANE_SWITCH = 1e-9


@dataclass(frozen=True, eq=False)
class ApolloniusSphere:
    """Sphere of simultaneously reachable points, for speed ratio < 1."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise DegenerateGeometryError(f"sphere radius must be positive, got {self.radius!r}")


@dataclass(frozen=True, eq=False)
class BisectorPlane:
    """Perpendicular bisector plane {x : <unit_normal, x> = offset}, for equal speeds."""

    unit_normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.unit_normal, dtype=float)
        object.__setattr__(self, "unit_normal", n)
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise DegenerateGeometryError("plane normal must have unit norm")


ApolloniusLocus = Union[ApolloniusSphere, BisectorPlane]


def apollonius_locus(x_E, x_P, alpha, *, min_separation: float = 0.0) -> ApolloniusLocus:
    """Locus of points the evader and pursuer reach in equal time.

    ``alpha`` is the evader/pursuer speed ratio and must be <= 1.  Positions
    closer than ``min_separation`` (or exactly coincident) are rejected: the
    locus is undefined there.
    """
    a = float(alpha.alpha if isinstance(alpha, SpeedRatio) else alpha)
    if a > 1.0 + PLANE_SWITCH:
        raise UnsupportedRegimeError(f"no equal-time locus is provided for speed ratio {a} > 1")
    x_E = np.asarray(x_E, dtype=float)
    x_P = np.asarray(x_P, dtype=float)
    separation = float(np.linalg.norm(x_P - x_E))
    if separation <= max(min_separation, 0.0):
        raise DegenerateGeometryError(
            f"evader and pursuer positions coincide (separation {separation})"
        )
    if abs(1.0 - a) < PLANE_SWITCH:
        normal = (x_P - x_E) / separation
        midpoint = 0.5 * (x_E + x_P)
        return BisectorPlane(unit_normal=normal, offset=float(normal @ midpoint))
    a2 = a * a
    center = (x_E - a2 * x_P) / (1.0 - a2)
    radius = a * separation / (1.0 - a2)
    return ApolloniusSphere(center=center, radius=radius)


def closest_point_to_origin(locus: ApolloniusLocus) -> tuple[np.ndarray, float]:
    """Point of the locus nearest the origin, and its distance.

    For a sphere the origin must lie strictly outside; the nearest point sits
    on the ray from the origin through the center, a radius short of it.
    """
    if isinstance(locus, ApolloniusSphere):
        R_c = float(np.linalg.norm(locus.center))
        if R_c <= locus.radius:
            raise RegionMismatchError(
                f"origin is inside the sphere (center norm {R_c} <= radius {locus.radius}); "
                "the pursuer-region interception point does not exist here"
            )
        point = (1.0 - locus.radius / R_c) * locus.center
        return point, R_c - locus.radius
    point = locus.offset * locus.unit_normal
    return point, abs(locus.offset)


def fibonacci_sphere_points(count: int) -> np.ndarray:
    """Deterministic, near-uniform unit-sphere sample (golden-angle lattice)."""
    k = np.arange(count, dtype=float)
    z = 1.0 - 2.0 * (k + 0.5) / count
    theta = math.pi * (1.0 + math.sqrt(5.0)) * k
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack((r * np.cos(theta), r * np.sin(theta), z))


def sample_locus(locus: ApolloniusLocus, count: int = 100, extent: float = 1.0) -> np.ndarray:
    """Points on the locus, for property checks and plots.

    Spheres are sampled with the Fibonacci lattice.  Planes are sampled on a
    golden-angle spiral of radius ``extent`` around the origin's projection.
    """
    if isinstance(locus, ApolloniusSphere):
        return locus.center + locus.radius * fibonacci_sphere_points(count)
    n = locus.unit_normal
    seed = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(n, seed)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    k = np.arange(count, dtype=float)
    radii = extent * np.sqrt((k + 0.5) / count)
    theta = math.pi * (1.0 + math.sqrt(5.0)) * k
    anchor = locus.offset * n
    return anchor + radii[:, None] * (np.cos(theta)[:, None] * e1 + np.sin(theta)[:, None] * e2)
