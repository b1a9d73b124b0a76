"""Upper half-plane model of the hyperbolic plane.

Points are complex numbers z with Im(z) > 0.  Orientation-preserving
isometries are real 2x2 matrices of determinant 1 acting by Moebius
transformations, taken up to overall sign (PSL(2,R)).  Geodesics are
half-circles centered on the real axis or vertical lines; we represent
them by their pair of ideal endpoints on R u {inf}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

INF = math.inf

# Determinant drift beyond this triggers renormalization on composition.
DET_TOL = 1e-12


class Isometry:
    """A 2x2 real matrix of unit determinant, up to sign."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: float, b: float, c: float, d: float):
        ad = a * d
        bc = b * c
        det = ad - bc
        if det <= 0:
            raise ValueError(f"matrix must have positive determinant, got {det}")
        # renormalize drift, but not below the cancellation noise of the
        # determinant itself (large-entry products), which would inject error
        noise = 4e-16 * (abs(ad) + abs(bc))
        if abs(det - 1.0) > max(DET_TOL, noise):
            s = 1.0 / math.sqrt(det)
            a, b, c, d = a * s, b * s, c * s, d * s
        # canonical sign: trace >= 0, ties broken by first nonzero entry
        if a + d < 0 or (a + d == 0 and (a < 0 or (a == 0 and b < 0))):
            a, b, c, d = -a, -b, -c, -d
        self.a, self.b, self.c, self.d = a, b, c, d

    @staticmethod
    def identity() -> "Isometry":
        return Isometry(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def translation_along_imaginary_axis(length: float) -> "Isometry":
        """Hyperbolic translation by `length` along (0, inf), moving upward."""
        e = math.exp(length / 2.0)
        return Isometry(e, 0.0, 0.0, 1.0 / e)

    def compose(self, other: "Isometry") -> "Isometry":
        """self after other (matrix product self @ other)."""
        return Isometry(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    __matmul__ = compose

    def inverse(self) -> "Isometry":
        return Isometry(self.d, -self.b, -self.c, self.a)

    @property
    def trace(self) -> float:
        return self.a + self.d

    def is_hyperbolic(self) -> bool:
        return abs(self.trace) > 2.0

    def translation_length(self) -> float:
        t = abs(self.trace) / 2.0
        if t <= 1.0:
            return 0.0
        return 2.0 * math.acosh(t)

    def __call__(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)

    def apply(self, p: "UhpPoint") -> "UhpPoint":
        w = self(complex(p.x, p.y))
        return UhpPoint(w.real, w.imag)

    def apply_boundary(self, x: float) -> float:
        """Action on the ideal boundary R u {inf}."""
        if x == INF:
            return INF if self.c == 0.0 else self.a / self.c
        den = self.c * x + self.d
        if den == 0.0:
            return INF
        return (self.a * x + self.b) / den

    def derivative(self, z: complex) -> complex:
        """dg/dz at z (the matrix has unit determinant)."""
        den = self.c * z + self.d
        return 1.0 / (den * den)

    def fixed_points(self) -> tuple[float, float]:
        """Ideal fixed points of a hyperbolic element as (repelling, attracting)."""
        if not self.is_hyperbolic():
            raise ValueError("fixed_points requires a hyperbolic element")
        a, b, c, d = self.a, self.b, self.c, self.d
        if abs(c) < 1e-300:
            # fixes inf; the finite fixed point solves (a - d) x + b = 0
            other = -b / (a - d)
            # inf is attracting iff |a/d| > 1
            return (other, INF) if abs(a) > abs(d) else (INF, other)
        disc = math.sqrt((a - d) * (a - d) + 4.0 * b * c)
        p1 = ((a - d) - disc) / (2.0 * c)
        p2 = ((a - d) + disc) / (2.0 * c)
        # attracting fixed point has |g'| < 1
        if abs(self.c * p1 + self.d) > 1.0:
            return (p1, p2)
        return (p2, p1)

    def axis(self) -> "Geodesic":
        """Oriented axis of a hyperbolic element (repelling -> attracting)."""
        rep, att = self.fixed_points()
        return Geodesic(rep, att)

    def matrix(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def almost_equal(self, other: "Isometry", tol: float = 1e-9) -> bool:
        return (
            abs(self.a - other.a) < tol
            and abs(self.b - other.b) < tol
            and abs(self.c - other.c) < tol
            and abs(self.d - other.d) < tol
        )

    def __repr__(self) -> str:
        return f"Isometry({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"


@dataclass(frozen=True)
class UhpPoint:
    """A point of the upper half-plane."""

    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"upper half-plane point needs y > 0, got y={self.y}")

    def as_complex(self) -> complex:
        return complex(self.x, self.y)

    @staticmethod
    def from_complex(z: complex) -> "UhpPoint":
        return UhpPoint(z.real, z.imag)


def distance(p: UhpPoint | complex, q: UhpPoint | complex) -> float:
    """Hyperbolic distance, via cosh d = 1 + |p - q|^2 / (2 Im(p) Im(q))."""
    zp = p.as_complex() if isinstance(p, UhpPoint) else p
    zq = q.as_complex() if isinstance(q, UhpPoint) else q
    dx = zp.real - zq.real
    dy = zp.imag - zq.imag
    return math.acosh(1.0 + (dx * dx + dy * dy) / (2.0 * zp.imag * zq.imag))


class Geodesic:
    """Oriented geodesic with ideal endpoints (backward, forward).

    The canonical unit-speed parameter lam runs toward the ideal point
    m - r on a half-circle of center m, radius r (and toward inf on a
    vertical line); `forward_sign` is +1 when that agrees with the
    orientation backward -> forward.
    """

    __slots__ = ("back", "fwd", "vertical", "m", "r", "forward_sign")

    def __init__(self, back: float, fwd: float):
        if back == fwd:
            raise ValueError("geodesic endpoints must be distinct")
        self.back = back
        self.fwd = fwd
        if back == INF or fwd == INF:
            self.vertical = True
            self.m = fwd if back == INF else back
            self.r = 0.0
            self.forward_sign = 1.0 if fwd == INF else -1.0
        else:
            self.vertical = False
            self.m = 0.5 * (back + fwd)
            self.r = 0.5 * abs(fwd - back)
            # canonical parameter increases toward the left endpoint m - r
            self.forward_sign = 1.0 if fwd < back else -1.0

    @staticmethod
    def from_point_angle(z: complex, theta: float) -> "Geodesic":
        """The geodesic through z in direction (cos theta, sin theta)."""
        c, s = math.cos(theta), math.sin(theta)
        if abs(c) < 1e-15:
            return Geodesic(z.real, INF) if s > 0 else Geodesic(INF, z.real)
        m = z.real + z.imag * s / c
        r = math.hypot(z.real - m, z.imag)
        return Geodesic(m - r, m + r) if c > 0 else Geodesic(m + r, m - r)

    def param_of(self, z: complex) -> float:
        """Canonical arclength parameter of a point on the geodesic."""
        if self.vertical:
            return math.log(z.imag)
        t = (self.m - z.real) / self.r
        if t >= 1.0:
            return INF
        if t <= -1.0:
            return -INF
        return math.atanh(t)

    def point_at(self, lam: float) -> complex:
        if self.vertical:
            return complex(self.m, math.exp(lam))
        return complex(self.m - self.r * math.tanh(lam), self.r / math.cosh(lam))

    def tangent_at(self, lam: float) -> complex:
        """Euclidean-unit tangent in the canonical (increasing-lam) direction."""
        if self.vertical:
            return complex(0.0, 1.0)
        return complex(-1.0 / math.cosh(lam), -math.tanh(lam))

    def angle_at(self, lam: float) -> float:
        """Direction angle of the oriented geodesic at parameter lam."""
        t = self.tangent_at(lam) * self.forward_sign
        return math.atan2(t.imag, t.real)

    def side_of(self, z: complex) -> float:
        """sinh of the signed distance from z; positive on the left side."""
        if self.vertical:
            return self.forward_sign * (self.m - z.real) / z.imag
        dx = z.real - self.m
        h = (dx * dx + z.imag * z.imag - self.r * self.r) / (2.0 * z.imag * self.r)
        # for a left-moving circle (forward toward m - r) the upper region
        # |z - m| > r is on the right
        return -self.forward_sign * h

    def reversed(self) -> "Geodesic":
        return Geodesic(self.fwd, self.back)

    def transformed(self, g: Isometry) -> "Geodesic":
        return Geodesic(g.apply_boundary(self.back), g.apply_boundary(self.fwd))

    def __repr__(self) -> str:
        return f"Geodesic({self.back!r} -> {self.fwd!r})"


def normalizer_to_imaginary_axis(geo: Geodesic, base: complex) -> Isometry:
    """Isometry sending geo -> (0, inf) oriented upward and foot(base) -> i.

    `base` need not lie on the geodesic; its orthogonal projection is sent
    to i.
    """
    p, q = geo.back, geo.fwd
    if p == INF:
        n0 = Isometry(0.0, 1.0, -1.0, q)
    elif q == INF:
        n0 = Isometry(1.0, -p, 0.0, 1.0)
    else:
        # z -> (z - p)/(q - z) up to sign, chosen so the determinant is > 0
        if q > p:
            n0 = Isometry(1.0, -p, -1.0, q)
        else:
            n0 = Isometry(-1.0, p, -1.0, q)
    w = n0(base)
    scale = abs(w)  # foot of the perpendicular from w to (0, inf) is i|w|
    s = 1.0 / math.sqrt(scale)
    return Isometry(s, 0.0, 0.0, 1.0 / s).compose(n0)


@dataclass(frozen=True)
class DirectedGeodesic:
    """A unit tangent direction: base point plus direction angle in [0, 2pi)."""

    base: UhpPoint
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", self.angle % (2.0 * math.pi))

    def geodesic(self) -> Geodesic:
        return Geodesic.from_point_angle(self.base.as_complex(), self.angle)

    def endpoints(self) -> tuple[float, float]:
        g = self.geodesic()
        return (g.back, g.fwd)

    @staticmethod
    def from_endpoints(back: float, fwd: float, arclength: float) -> "DirectedGeodesic":
        """Reconstruct from ideal endpoints plus the canonical arclength parameter.

        The parameter is the canonical one of `Geodesic`, so
        from_endpoints(*d.endpoints(), g.param_of(base)) round-trips d.
        """
        g = Geodesic(back, fwd)
        z = g.point_at(arclength)
        return DirectedGeodesic(UhpPoint(z.real, z.imag), g.angle_at(arclength))

    def transformed(self, g: Isometry) -> "DirectedGeodesic":
        z = self.base.as_complex()
        w = g(z)
        dg = g.derivative(z)
        t = complex(math.cos(self.angle), math.sin(self.angle)) * dg
        return DirectedGeodesic(UhpPoint(w.real, w.imag), math.atan2(t.imag, t.real))


def apply(iso: Isometry, p: UhpPoint) -> UhpPoint:
    """Moebius action of an isometry on a point."""
    return iso.apply(p)


def geodesic_intersection(g1: Geodesic, g2: Geodesic) -> complex | None:
    """The intersection point of two geodesics in the open half-plane, if any."""
    if g1.vertical and g2.vertical:
        return None
    if g1.vertical or g2.vertical:
        v, c = (g1, g2) if g1.vertical else (g2, g1)
        y2 = c.r * c.r - (v.m - c.m) * (v.m - c.m)
        if y2 <= 0.0:
            return None
        return complex(v.m, math.sqrt(y2))
    if g1.m == g2.m:
        return None
    x = (g1.m * g1.m - g1.r * g1.r - g2.m * g2.m + g2.r * g2.r) / (2.0 * (g1.m - g2.m))
    y2 = g1.r * g1.r - (x - g1.m) * (x - g1.m)
    if y2 <= 0.0:
        return None
    return complex(x, math.sqrt(y2))


def angle_between(theta1: float, theta2: float) -> float:
    """Unsigned angle between two directions, in [0, pi]."""
    d = (theta1 - theta2) % (2.0 * math.pi)
    return d if d <= math.pi else 2.0 * math.pi - d


def perpendicular_bisector(p: complex, q: complex) -> Geodesic:
    """The geodesic equidistant from two points (orientation arbitrary)."""
    n2p, n2q = p.real * p.real + p.imag * p.imag, q.real * q.real + q.imag * q.imag
    dy = q.imag - p.imag
    if abs(dy) < 1e-14 * (p.imag + q.imag):
        # same height: vertical bisector
        if abs(p.real - q.real) < 1e-300:
            raise ValueError("points coincide; bisector undefined")
        x = (n2p - n2q) / (2.0 * (p.real - q.real))
        return Geodesic(x, INF)
    m = (q.imag * p.real - p.imag * q.real) / dy
    r2 = m * m - (q.imag * n2p - p.imag * n2q) / dy
    if r2 <= 0.0:
        raise ValueError("degenerate bisector")
    r = math.sqrt(r2)
    return Geodesic(m - r, m + r)
