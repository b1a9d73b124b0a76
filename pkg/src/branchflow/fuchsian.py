"""Explicit Fuchsian realizations of hyperbolic sheets.

Two sheet kinds are supported: the one-holed torus and the pair of
pants, each with prescribed geodesic boundary lengths.  A realization
carries the group generators, one distinguished boundary element per
end (whose axis translation length is the boundary length), and a
fundamental polygon of the convex core with side pairings.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace

from .domain import CorePolygon, DomainError, dirichlet_core_polygon
from .halfplane import Geodesic, Isometry, normalizer_to_imaginary_axis

TORUS = "one_holed_torus"
PANTS = "pair_of_pants"


@dataclass(frozen=True)
class FuchsianSheetRealization:
    """A discrete group with fundamental polygon realizing one sheet."""

    kind: str
    generators: tuple[Isometry, ...]
    boundary_axes: tuple[Isometry, ...]       # one hyperbolic element per end
    boundary_lengths: tuple[float, ...]
    domain: CorePolygon
    sheet_id: str = ""

    def with_sheet_id(self, sheet_id: str) -> "FuchsianSheetRealization":
        return replace(self, sheet_id=sheet_id)

    def end_count(self) -> int:
        return len(self.boundary_axes)


def commutator(a: Isometry, b: Isometry) -> Isometry:
    return a.compose(b).compose(a.inverse()).compose(b.inverse())


def _torus_trace(boundary_length: float) -> float:
    """Common generator trace of the maximally symmetric one-holed torus.

    With equal traces t = tr A = tr B = tr AB, the Fricke identity gives
    tr[A,B] = 3 t^2 - t^3 - 2, and tr[A,B] = -2 cosh(L/2) is solved in
    closed form by t = 1 + 2 cosh(L/6).
    """
    return 1.0 + 2.0 * math.cosh(boundary_length / 6.0)


@functools.lru_cache(maxsize=128)
def build_one_holed_torus(boundary_length: float) -> FuchsianSheetRealization:
    """Symmetric one-holed torus whose boundary geodesic has the given length.

    Generators A and B are translations of equal length whose axes cross
    at i; the boundary element is the commutator [A, B].
    """
    if not boundary_length > 0:
        raise ValueError("boundary length must be positive")
    t = _torus_trace(boundary_length)
    c = t / 2.0
    s = math.sqrt(c * c - 1.0)
    # axes cross at i at the angle phi that forces tr(AB) = t
    cphi = -t / (t + 2.0)
    sphi = math.sqrt(1.0 - cphi * cphi)
    a = Isometry(c, s, s, c)
    b = Isometry(c + s * sphi, s * cphi, s * cphi, c - s * sphi)
    k = commutator(a, b)
    assert abs(abs(k.trace) - 2.0 * math.cosh(boundary_length / 2.0)) < 1e-9 * (
        1.0 + abs(k.trace)
    )
    domain = _build_domain(
        [a, b],
        [k],
        [complex(0.0, 1.0), complex(0.013, 0.997), complex(-0.029, 1.017)],
    )
    return FuchsianSheetRealization(
        kind=TORUS,
        generators=(a, b),
        boundary_axes=(k,),
        boundary_lengths=(boundary_length,),
        domain=domain,
    )


def _pants_generators(l1: float, l2: float, l3: float):
    """Boundary elements X, Y and Z = (XY)^-1 with the prescribed lengths.

    X translates along the imaginary axis.  Y translates along the
    geodesic that meets the common perpendicular of the two axes (the
    unit half-circle through i) at seam distance s12, where the seam
    length comes from the right-angled hexagon relation
    cosh s12 = (cosh(l3/2) + cosh(l1/2) cosh(l2/2)) / (sinh(l1/2) sinh(l2/2)).
    """
    a1, a2, a3 = l1 / 2.0, l2 / 2.0, l3 / 2.0
    s12 = math.acosh(
        (math.cosh(a3) + math.cosh(a1) * math.cosh(a2))
        / (math.sinh(a1) * math.sinh(a2))
    )
    x = Isometry.translation_along_imaginary_axis(l1)
    # unit-circle normalizer: (-1, +1, i) -> (0, inf, i)
    n = Isometry(1.0, 1.0, -1.0, 1.0)
    es = math.exp(s12)
    ms = Isometry(1.0, es, -1.0, es)  # (-e^s, +e^s) -> (0, inf)
    conj = ms.compose(n)
    for sign in (1.0, -1.0):
        d = Isometry.translation_along_imaginary_axis(sign * l2)
        y = conj.inverse().compose(d).compose(conj)
        xy = x.compose(y)
        if abs(abs(xy.trace) - 2.0 * math.cosh(a3)) < 1e-9 * (1.0 + abs(xy.trace)):
            return x, y, xy.inverse()
    raise DomainError("pants construction: no seam orientation matched")


@functools.lru_cache(maxsize=128)
def build_pair_of_pants(l1: float, l2: float, l3: float) -> FuchsianSheetRealization:
    """Pair of pants with boundary geodesics of lengths (l1, l2, l3)."""
    if not (l1 > 0 and l2 > 0 and l3 > 0):
        raise ValueError("boundary lengths must be positive")
    x, y, z = _pants_generators(l1, l2, l3)
    centers = [_pants_center(x, y, frac) for frac in (0.5, 0.43, 0.58, 0.36)]
    domain = _build_domain([x, y], [x, y, z], centers)
    return FuchsianSheetRealization(
        kind=PANTS,
        generators=(x, y),
        boundary_axes=(x, y, z),
        boundary_lengths=(l1, l2, l3),
        domain=domain,
    )


def _build_domain(gens, boundary_elements, centers) -> CorePolygon:
    last: Exception | None = None
    for center in centers:
        try:
            return dirichlet_core_polygon(
                gens, boundary_elements, center, expected_area=2.0 * math.pi
            )
        except DomainError as err:
            last = err
    raise DomainError(f"all domain centers failed: {last}")


def _pants_center(x: Isometry, y: Isometry, frac: float = 0.5) -> complex:
    """An interior point of the convex core: a point of the seam
    perpendicular between the axes of X and Y."""
    ax, ay = x.axis(), y.axis()
    # the seam lies on the common perpendicular; for our normalization that
    # is the unit half-circle, but recompute generically: feet of the
    # perpendicular are the closest-approach points of the two axes
    n = normalizer_to_imaginary_axis(ax, complex(0.0, 1.0))
    ay_n = ay.transformed(n)
    # distance from (0, inf) to a half-circle (m, r) is minimized at the
    # point of the circle hit by the perpendicular from the axis; the foot
    # on (0, inf) is i sqrt(|m^2 - r^2|)
    if ay_n.vertical:
        raise DomainError("pants axes intersect; invalid construction")
    foot_height = math.sqrt(abs((ay_n.m - ay_n.r) * (ay_n.m + ay_n.r)))
    seam = Geodesic.from_point_angle(complex(0.0, foot_height), 0.0)
    lam_a = seam.param_of(complex(0.0, foot_height))
    # other foot: intersection of the seam with the Y axis
    from .halfplane import geodesic_intersection

    other = geodesic_intersection(seam, ay_n)
    if other is None:
        raise DomainError("pants seam does not meet the second axis")
    lam_b = seam.param_of(other)
    mid = seam.point_at(lam_a + frac * (lam_b - lam_a))
    return n.inverse()(mid)
