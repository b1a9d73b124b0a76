"""Closed-form growth quantities of hyperbolic space.

These are the exact-formula ingredients of the frame-length bound: the
circumference of hyperbolic-plane circles, the area of spheres and the
volume of balls in hyperbolic 3-space (both of exponential growth rate
2R), and Gauss-Bonnet areas of hyperbolic surfaces.
"""

from __future__ import annotations

import math

TAU = 2.0 * math.pi


def circle_circumference_h2(radius: float) -> float:
    """Length of the circle of the given radius in the hyperbolic plane."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    return TAU * math.sinh(radius)


def sphere_area_h3(radius: float) -> float:
    """Area of the sphere of the given radius in hyperbolic 3-space: 4 pi sinh^2 R."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    s = math.sinh(radius)
    return 4.0 * math.pi * s * s


def ball_volume_h3(radius: float) -> float:
    """Volume of the ball of the given radius in hyperbolic 3-space.

    Equals the integral of sphere_area_h3 from 0 to R, in closed form
    pi (sinh 2R - 2R).
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    return math.pi * (math.sinh(2.0 * radius) - 2.0 * radius)


def sheet_area(genus: int, boundary_count: int) -> float:
    """Gauss-Bonnet area 2 pi (2g - 2 + b) of a hyperbolic surface.

    The type must be hyperbolic: 2 - 2g - b < 0.
    """
    if genus < 0 or boundary_count < 0:
        raise ValueError("genus and boundary count must be nonnegative")
    chi = 2 - 2 * genus - boundary_count
    if chi >= 0:
        raise ValueError(
            f"no hyperbolic structure on genus {genus} with {boundary_count} "
            f"boundary components (Euler characteristic {chi} >= 0)"
        )
    return TAU * (-chi)
