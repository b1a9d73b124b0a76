"""Growth rate of the non-deterministic geodesic flow and frame-length bounds.

A geodesic crossing a branch circle pays an information cost
l = -log(deg/dl) - log(deg/dr).  The exponential growth rate of the
averaged sphere length on the branched surface is

    rate = 1 + sum over circles of 0.5 * length * degree * l / mass,

and since nothing inside hyperbolic 3-space can outgrow the exponent 2
of its ball volume, the affine constraint sum(c * length) <= 1 on the
per-circle coefficients c = 0.5 * degree * l / mass yields explicit
upper bounds on the total branch-locus length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .growth import circle_circumference_h2
from .model import BranchedSurfaceSpec, mass, require_valid


def branch_cost(deg: float, dl: float, dr: float) -> float:
    """Crossing cost -log(deg/dl) - log(deg/dr) of a branch circle.

    deg/dl and deg/dr are the probabilities that a geodesic arriving on
    the left (right) side crosses this circle; both must be <= 1.
    """
    if not deg > 0:
        raise ValueError("degree must be positive")
    if deg > dl or deg > dr:
        raise ValueError(
            f"degree {deg} exceeds a side degree ({dl}, {dr}): probability > 1"
        )
    return -math.log(deg / dl) - math.log(deg / dr)


@dataclass(frozen=True)
class CurveGrowth:
    curve_id: str
    cost: float            # l = -log(deg/dl) - log(deg/dr)
    coefficient: float     # c = 0.5 * degree * cost / mass, units 1/length
    length: float | None   # bound numeric length, if available


@dataclass(frozen=True)
class GrowthReport:
    mass: float
    curves: tuple[CurveGrowth, ...]
    growth_rate: float
    spec_hash: str | None = None

    @property
    def coefficient_sum(self) -> float:
        return sum(c.coefficient for c in self.curves)

    def to_json_dict(self) -> dict:
        return {
            "mass": self.mass,
            "growth_rate": self.growth_rate,
            "coefficient_sum": self.coefficient_sum,
            "curves": [
                {
                    "id": c.curve_id,
                    "cost": c.cost,
                    "coefficient": c.coefficient,
                    "length": c.length,
                }
                for c in self.curves
            ],
        }


@dataclass(frozen=True)
class BoundResult:
    """The region where the growth exponent stays within the ambient limit.

    The constraint is sum(coefficient * length) <= 1 over nonnegative
    lengths; `uniform_max` is the supremum when all circles share one
    length, `per_curve_max` when all but one are held at zero.  The
    bounds are open-interval suprema: at the uniform maximum the growth
    rate equals exactly 2.
    """

    unbounded: bool
    uniform_max: float
    per_curve_max: dict[str, float]
    coefficients: dict[str, float]
    slack: float | None  # 1 - sum(c * length) at the current bindings

    def to_json_dict(self) -> dict:
        return {
            "unbounded": self.unbounded,
            "uniform_max": None if self.unbounded else self.uniform_max,
            "per_curve_max": {
                k: (None if math.isinf(v) else v) for k, v in self.per_curve_max.items()
            },
            "coefficients": self.coefficients,
            "slack": self.slack,
        }


def _curve_terms(spec: BranchedSurfaceSpec, mode: str):
    m = mass(spec, mode=mode)
    terms = []
    for c in spec.branch_curves:
        cost = branch_cost(c.degree, c.deg_left, c.deg_right)
        coeff = 0.5 * c.degree * cost / m
        terms.append((c, cost, coeff))
    return m, terms


def growth_rate(spec: BranchedSurfaceSpec, mode: str = "strict") -> GrowthReport:
    """Exponential growth rate 1 + sum(0.5 * length * degree * cost / mass).

    All circle lengths must be bound to numbers.
    """
    require_valid(spec, mode=mode)
    m, terms = _curve_terms(spec, mode)
    rate = 1.0
    curves = []
    for c, cost, coeff in terms:
        length = spec.require(c.length)
        rate += coeff * length
        curves.append(
            CurveGrowth(curve_id=c.id, cost=cost, coefficient=coeff, length=length)
        )
    return GrowthReport(mass=m, curves=tuple(curves), growth_rate=rate)


def sphere_length_lower_bound(
    spec: BranchedSurfaceSpec, radius: float, mode: str = "strict"
) -> float:
    """Lower bound 2 pi sinh(R) exp(R (rate - 1)) for the averaged length
    of the branched sphere of radius R."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    report = growth_rate(spec, mode=mode)
    return circle_circumference_h2(radius) * math.exp(
        radius * (report.growth_rate - 1.0)
    )


def frame_length_bound(spec: BranchedSurfaceSpec, mode: str = "strict") -> BoundResult:
    """Invert the exponent-2 volume-growth constraint into length bounds.

    Lengths may be symbolic; only the degrees enter the coefficients.
    With no branching cost anywhere the result is flagged unbounded.
    """
    require_valid(spec, mode=mode)
    _, terms = _curve_terms(spec, mode)
    coeffs = {c.id: coeff for c, _, coeff in terms}
    total = sum(coeffs.values())
    unbounded = total == 0.0
    per_curve = {
        cid: (math.inf if coeff == 0.0 else 1.0 / coeff)
        for cid, coeff in coeffs.items()
    }
    slack = None
    if all(spec.resolve(c.length) is not None for c in spec.branch_curves):
        used = sum(
            coeffs[c.id] * spec.require(c.length) for c in spec.branch_curves
        )
        slack = 1.0 - used
    return BoundResult(
        unbounded=unbounded,
        uniform_max=math.inf if unbounded else 1.0 / total,
        per_curve_max=per_curve,
        coefficients=coeffs,
        slack=slack,
    )


def family_bound_reference(n: int) -> float:
    """Reference closed form 8 pi / ((n-1) log(n-1)) for the n-tori family.

    This is the published companion value for the family; it agrees with
    frame_length_bound(family_tori_on_solid_torus(n)).uniform_max at
    n = 3 and differs from it by a factor (n-1)/2 for n >= 4, where the
    coefficient-based bound 4 pi / log(n-1) is the one this library
    derives.  Both are reported side by side and no agreement is
    asserted beyond n = 3.
    """
    if n < 3:
        raise ValueError("the family needs n >= 3 tori")
    return 8.0 * math.pi / ((n - 1) * math.log(n - 1))
