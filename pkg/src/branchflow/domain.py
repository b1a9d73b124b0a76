"""Fundamental polygons for convex cores of Fuchsian groups.

The fundamental domain of a sheet is computed as a Dirichlet domain of
the group action, truncated by the lifts of the boundary axes (the
frontier of the convex hull of the limit set).  Half-plane intersection
is done in the Klein model, where hyperbolic half-planes are Euclidean
half-planes, then everything is mapped back to the upper half-plane and
the vertices are re-derived exactly from the defining geodesics.

The resulting polygon tiles the convex core: every side either carries
a group element identifying it with a partner side, or lies on a lift
of a boundary axis.  Correctness is certified by Gauss-Bonnet: the
polygon area must equal the core area -2 pi chi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .halfplane import (
    INF,
    Geodesic,
    Isometry,
    angle_between,
    geodesic_intersection,
    perpendicular_bisector,
)

AREA_TOL = 1e-6
MERGE_TOL = 1e-9


class DomainError(RuntimeError):
    """The fundamental-polygon construction failed to certify."""


@dataclass
class Side:
    """One side of a core polygon.

    kind "pair": crossing it leaves the Dirichlet cell; `transform` maps
    the state back into the cell.  kind "boundary": the side lies on a
    lift of boundary axis `end_index`; `to_canonical` maps that lift to
    the end's canonical axis.
    """

    geo: Geodesic
    sign: float
    lam_lo: float
    lam_hi: float
    kind: str
    transform: Isometry | None = None
    word: Isometry | None = None
    end_index: int | None = None
    to_canonical: Isometry | None = None
    partner: int | None = None

    def inside_margin(self, z: complex) -> float:
        """sinh of signed distance from z, positive on the polygon side."""
        return self.sign * self.geo.side_of(z)


@dataclass
class CorePolygon:
    center: complex
    vertices: list[complex]
    sides: list[Side]
    area: float

    def contains(self, z: complex, tol: float = 1e-9) -> bool:
        return all(s.inside_margin(z) >= -tol for s in self.sides)

    def most_violated(self, z: complex) -> tuple[int, float]:
        worst, m_worst = 0, math.inf
        for i, s in enumerate(self.sides):
            m = s.inside_margin(z)
            if m < m_worst:
                worst, m_worst = i, m
        return worst, m_worst

    def bounding_box(self) -> tuple[float, float, float, float]:
        """Euclidean (xmin, xmax, ymin, ymax) in the half-plane model."""
        xs = [v.real for v in self.vertices]
        ys = [v.imag for v in self.vertices]
        ymax = max(ys)
        for s in self.sides:
            # a circular side bulges upward if its top lies inside the segment
            if not s.geo.vertical and s.lam_lo < 0.0 < s.lam_hi:
                ymax = max(ymax, s.geo.r)
        return (min(xs), max(xs), min(ys), ymax)

    def diameter(self) -> float:
        from .halfplane import distance

        vs = self.vertices
        return max(
            distance(vs[i], vs[j])
            for i in range(len(vs))
            for j in range(i + 1, len(vs))
        )


# --- Klein model helpers -------------------------------------------------


def _uhp_to_klein(z: complex) -> tuple[float, float]:
    w = (z - 1j) / (z + 1j)
    d = 1.0 + w.real * w.real + w.imag * w.imag
    return (2.0 * w.real / d, 2.0 * w.imag / d)


def _klein_to_uhp(k: tuple[float, float]) -> complex:
    n2 = k[0] * k[0] + k[1] * k[1]
    if n2 >= 1.0:
        raise DomainError("vertex escaped the Klein disk")
    w = complex(k[0], k[1]) / (1.0 + math.sqrt(1.0 - n2))
    return 1j * (1.0 + w) / (1.0 - w)


def _boundary_to_klein(x: float) -> tuple[float, float]:
    if x == INF:
        return (1.0, 0.0)
    e = (x - 1j) / (x + 1j)
    return (e.real, e.imag)


# --- half-plane clipping --------------------------------------------------


class _Constraint:
    __slots__ = ("geo", "e1", "e2", "csign", "kind", "transform", "word",
                 "end_index", "to_canonical")

    def __init__(self, geo: Geodesic, center_k, kind, transform=None, word=None,
                 end_index=None, to_canonical=None):
        self.geo = geo
        self.e1 = _boundary_to_klein(geo.back)
        self.e2 = _boundary_to_klein(geo.fwd)
        f = self._raw(center_k)
        if abs(f) < 1e-14:
            raise DomainError("domain center lies on a constraint geodesic")
        self.csign = 1.0 if f > 0 else -1.0
        self.kind = kind
        self.transform = transform
        self.word = word
        self.end_index = end_index
        self.to_canonical = to_canonical

    def _raw(self, k) -> float:
        return (self.e2[0] - self.e1[0]) * (k[1] - self.e1[1]) - (
            self.e2[1] - self.e1[1]
        ) * (k[0] - self.e1[0])

    def value(self, k) -> float:
        """Positive inside the kept half-plane."""
        return self.csign * self._raw(k)

    def same_geodesic(self, other: "_Constraint", tol: float = MERGE_TOL) -> bool:
        g, h = self.geo, other.geo
        if g.vertical != h.vertical:
            return False
        if g.vertical:
            return abs(g.m - h.m) < tol
        return abs(g.m - h.m) < tol and abs(g.r - h.r) < tol


def _clip(poly, constraint_index, cons):
    """Sutherland-Hodgman step; polygon entries are (point, edge_constraint)."""
    c = cons[constraint_index]
    out = []
    n = len(poly)
    for i in range(n):
        p, ep = poly[i]
        q, _ = poly[(i + 1) % n]
        fp, fq = c.value(p), c.value(q)
        if fp >= 0.0:
            out.append((p, ep))
            if fq < 0.0:
                t = fp / (fp - fq)
                m = (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))
                out.append((m, constraint_index))
        elif fq >= 0.0:
            t = fp / (fp - fq)
            m = (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))
            out.append((m, ep))
    return out


def _dedupe_chain(poly):
    """Drop zero-length edges and merge consecutive edges on one constraint."""
    changed = True
    while changed and len(poly) > 2:
        changed = False
        n = len(poly)
        for i in range(n):
            p, ep = poly[i]
            q, eq = poly[(i + 1) % n]
            if math.hypot(p[0] - q[0], p[1] - q[1]) < 1e-13:
                # keep the earlier vertex, its edge label must continue
                poly.pop((i + 1) % n)
                changed = True
                break
            if ep == eq:
                poly.pop((i + 1) % n)
                changed = True
                break
    return poly


def intersect_half_planes(constraints: list[_Constraint], center: complex) -> CorePolygon:
    square = [((-2.0, -2.0), -1), ((2.0, -2.0), -2), ((2.0, 2.0), -3), ((-2.0, 2.0), -4)]
    poly = square
    for idx in range(len(constraints)):
        poly = _clip(poly, idx, constraints)
        if len(poly) < 3:
            raise DomainError("half-plane intersection collapsed")
    poly = _dedupe_chain(poly)
    if any(eid < 0 for _, eid in poly):
        raise DomainError("domain is unbounded (clip square edges survive)")

    # merge consecutive edges whose constraints share a geodesic
    changed = True
    while changed and len(poly) > 2:
        changed = False
        for i in range(len(poly)):
            _, ep = poly[i]
            j = (i + 1) % len(poly)
            _, eq = poly[j]
            if ep != eq and constraints[ep].same_geodesic(constraints[eq]):
                poly.pop(j)
                changed = True
                break

    edge_ids = [eid for _, eid in poly]

    # prefer a boundary label when a bisector coincides with an axis lift
    boundary_cons = [c for c in constraints if c.kind == "boundary"]
    for pos, eid in enumerate(edge_ids):
        c = constraints[eid]
        if c.kind != "boundary":
            for bc in boundary_cons:
                if c.same_geodesic(bc):
                    edge_ids[pos] = constraints.index(bc)
                    break

    # vertices, re-derived exactly from adjacent constraint geodesics
    n = len(poly)
    vertices: list[complex] = []
    for i in range(n):
        g_prev = constraints[edge_ids[(i - 1) % n]].geo
        g_next = constraints[edge_ids[i]].geo
        z = geodesic_intersection(g_prev, g_next)
        if z is None:
            z = _klein_to_uhp(poly[i][0])
        vertices.append(z)

    sides: list[Side] = []
    for i in range(n):
        c = constraints[edge_ids[i]]
        v0, v1 = vertices[i], vertices[(i + 1) % n]
        l0, l1 = c.geo.param_of(v0), c.geo.param_of(v1)
        margin = c.geo.side_of(center)
        sides.append(
            Side(
                geo=c.geo,
                sign=1.0 if margin > 0 else -1.0,
                lam_lo=min(l0, l1),
                lam_hi=max(l0, l1),
                kind=c.kind,
                transform=c.transform,
                word=c.word,
                end_index=c.end_index,
                to_canonical=c.to_canonical,
            )
        )

    # pair sides with their inverse-word partners
    for i, s in enumerate(sides):
        if s.kind != "pair" or s.partner is not None:
            continue
        winv = s.word.inverse()
        for j, t in enumerate(sides):
            if j != i and t.kind == "pair" and t.word.almost_equal(winv, 1e-8):
                s.partner, t.partner = j, i
                break

    area = polygon_area(vertices, sides)
    return CorePolygon(center=center, vertices=vertices, sides=sides, area=area)


def polygon_area(vertices: list[complex], sides: list[Side]) -> float:
    """Gauss-Bonnet area (n-2) pi - sum of interior angles."""
    n = len(vertices)
    total = 0.0
    for i in range(n):
        v = vertices[i]
        s_in = sides[(i - 1) % n]
        s_out = sides[i]
        lam_v_in = s_in.geo.param_of(v)
        lam_v_out = s_out.geo.param_of(v)
        # direction along the incoming side back toward the previous vertex,
        # and along the outgoing side toward the next vertex
        t_in = s_in.geo.tangent_at(lam_v_in)
        if s_in.geo.param_of(vertices[(i - 1) % n]) < lam_v_in:
            t_in = -t_in
        t_out = s_out.geo.tangent_at(lam_v_out)
        if s_out.geo.param_of(vertices[(i + 1) % n]) < lam_v_out:
            t_out = -t_out
        a_in = math.atan2(t_in.imag, t_in.real)
        a_out = math.atan2(t_out.imag, t_out.real)
        total += angle_between(a_in, a_out)
    return (n - 2) * math.pi - total


# --- Dirichlet domain of a convex-core quotient ---------------------------


def _reduced_words(gens: list[Isometry], max_len: int):
    """Nonempty reduced words over gens and inverses, as (Isometry, letters).

    Letters are labeled i for a generator and ~i for its inverse, so a word
    is reduced iff no letter is followed by its bitwise complement.
    """
    letters = []
    for i, g in enumerate(gens):
        letters.append((g, i))
        letters.append((g.inverse(), ~i))
    frontier = [(g, (lab,)) for g, lab in letters]
    words = list(frontier)
    for _ in range(max_len - 1):
        nxt = [
            (g.compose(h), labs + (lab,))
            for g, labs in frontier
            for h, lab in letters
            if labs[-1] != ~lab
        ]
        words.extend(nxt)
        frontier = nxt
    return words


def dirichlet_core_polygon(
    gens: list[Isometry],
    boundary_elements: list[Isometry],
    center: complex,
    expected_area: float,
    word_len: int = 3,
    max_word_len: int = 5,
) -> CorePolygon:
    """Dirichlet domain about `center`, truncated to the convex core.

    Raises DomainError if the Gauss-Bonnet certificate cannot be met.
    """
    last_err: Exception | None = None
    for wl in range(word_len, max_word_len + 1):
        try:
            poly = _dirichlet_attempt(gens, boundary_elements, center, wl)
        except DomainError as err:
            last_err = err
            continue
        if abs(poly.area - expected_area) <= AREA_TOL:
            return poly
        last_err = DomainError(
            f"polygon area {poly.area} != expected {expected_area} at word length {wl}"
        )
    raise DomainError(f"core polygon construction failed: {last_err}")


def _dirichlet_attempt(gens, boundary_elements, center, word_len) -> CorePolygon:
    ck = _uhp_to_klein(center)
    words = _reduced_words(gens, word_len)

    constraints: list[_Constraint] = []
    seen_pts: set[tuple[int, int]] = set()
    for g, labs in words:
        img = g(center)
        key = (round(img.real * 1e10), round(img.imag * 1e10))
        if key in seen_pts or abs(img - center) < 1e-12:
            continue
        seen_pts.add(key)
        geo = perpendicular_bisector(center, img)
        constraints.append(
            _Constraint(geo, ck, "pair", transform=g.inverse(), word=g)
        )

    conjugators = [(Isometry.identity(), ())] + [(g, labs) for g, labs in words]
    for j, k_elt in enumerate(boundary_elements):
        base_axis = k_elt.axis()
        seen_axes: set = set()
        for u, _labs in conjugators:
            axis = base_axis.transformed(u)
            ends = []
            for v in (axis.back, axis.fwd):
                ends.append(("inf", 0) if v == INF else ("fin", round(v * 1e9)))
            key = tuple(sorted(ends))
            if key in seen_axes:
                continue
            seen_axes.add(key)
            constraints.append(
                _Constraint(
                    axis, ck, "boundary", end_index=j, to_canonical=u.inverse()
                )
            )

    return intersect_half_planes(constraints, center)
