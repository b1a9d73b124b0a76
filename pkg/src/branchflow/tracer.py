"""Non-deterministic geodesic flow on a realized branched surface.

A trajectory is walked through the fundamental polygon of its current
sheet: advance to the first side crossed, re-enter through the paired
side for interior sides, and branch at boundary sides.  At a branch
circle the continuation is sampled among the circles incident to the
current sheet end with weights equal to their cycle degrees, which by
the switch condition is the degree-over-side-degree crossing
probability.  All randomness is counter-based (Philox keyed by seed and
trajectory, with the decision index as counter), so replay and parallel
execution are order-independent and bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .domain import CorePolygon, Side
from .halfplane import Geodesic, Isometry, UhpPoint, angle_between, geodesic_intersection
from .realize import RealizedSurface

SEG_TOL = 1e-9          # side-segment inclusion tolerance, arclength units
FORWARD_TOL = -1e-12    # smallest admissible advance to a crossing
ANGLE_TOL = 1e-9        # tangential-incidence cutoff
GAP_TOL = 1e-9          # shortest admissible segment between crossings
INSIDE_TOL = 1e-8       # polygon membership slack after reduction

TANGENTIAL_FAIL_FRACTION = 1e-4  # discarded trajectories beyond this fail a run


class TangentialIncidenceError(RuntimeError):
    """Probability-zero geometry (tangential hit or stuck reduction).

    Estimators discard and count such trajectories; runs fail loudly if
    they stop being rare.
    """


class TangentialOverrunError(RuntimeError):
    """Too many discarded trajectories; indicates a geometry bug."""


@dataclass(frozen=True)
class CrossingEvent:
    curve_id: str
    from_sheet: str
    to_sheet: str
    arclength: float          # trajectory arclength at the crossing
    incidence_angle: float    # against the circle, in (0, pi)
    probability: float


@dataclass(frozen=True)
class FlowState:
    """A point of the flow: sheet, pose in its chart, and decision history.

    For escaped states (a geodesic that left through a circle-free end
    and can never return) the pose freezes at the exit while `elapsed`
    keeps counting the straight run beyond it.
    """

    sheet_id: str
    position: UhpPoint
    angle: float
    elapsed: float = 0.0
    neg_log_prob: float = 0.0
    decision_count: int = 0
    history: tuple[CrossingEvent, ...] = ()
    escaped_end: str | None = None


class DecisionStream:
    """Counter-based randomness for one trajectory.

    draw(i) depends only on (seed, trajectory, i); init_generator() is a
    sequential stream in a disjoint counter block, used for sampling the
    initial condition.
    """

    __slots__ = ("key",)

    def __init__(self, seed: int, trajectory: int):
        self.key = np.array([seed, trajectory], dtype=np.uint64)

    def draw(self, index: int) -> float:
        counter = np.array([index, 0, 0, 0], dtype=np.uint64)
        bits = np.random.Philox(key=self.key, counter=counter)
        return np.random.Generator(bits).random()

    def init_generator(self) -> np.random.Generator:
        counter = np.array([0, 1, 0, 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=self.key, counter=counter))


def _apply_pose(g: Isometry, z: complex, angle: float) -> tuple[complex, float]:
    w = g(z)
    d = g.derivative(z)
    t = complex(math.cos(angle), math.sin(angle)) * d
    return w, math.atan2(t.imag, t.real)


def _leaving_rate(side: Side, z: complex, u: complex) -> float:
    """d/ds of the inside margin along Euclidean-unit direction u at a
    point z on the side's geodesic; negative means the ray is exiting."""
    geo = side.geo
    if geo.vertical:
        return side.sign * geo.forward_sign * (-u.real) / z.imag
    gx = (z.real - geo.m) / (z.imag * geo.r)
    gy = 1.0 / geo.r
    return side.sign * (-geo.forward_sign) * (u.real * gx + u.imag * gy)


def _reduce_pose(poly: CorePolygon, z: complex, angle: float) -> tuple[complex, float]:
    """Apply pairing transforms until the pose lies in the polygon."""
    for _ in range(64):
        worst_i, worst_m = -1, -INSIDE_TOL
        for i, s in enumerate(poly.sides):
            m = s.inside_margin(z)
            if m < worst_m and s.kind == "pair":
                worst_i, worst_m = i, m
        if worst_i < 0:
            break
        z, angle = _apply_pose(poly.sides[worst_i].transform, z, angle)
    else:
        raise TangentialIncidenceError("polygon reduction did not converge")
    if any(s.inside_margin(z) < -INSIDE_TOL for s in poly.sides):
        raise TangentialIncidenceError("pose stuck outside the polygon")
    return z, angle


def _walk(
    realized: RealizedSurface,
    sheet_id: str,
    z: complex,
    angle: float,
    remaining: float,
    decision_count: int,
    stream: DecisionStream,
    events: list | None,
):
    """Advance the flow; returns the final raw pose and accumulators.

    events, when given, receives tuples (arclength_from_start, curve_id,
    from_sheet, to_sheet, incidence_angle, probability).
    """
    sheet = realized.sheets[sheet_id]
    poly = sheet.polygon
    ray = Geodesic.from_point_angle(z, angle)
    lam = ray.param_of(z)
    elapsed = 0.0
    nlp = 0.0
    last_event_at = -math.inf
    max_steps = 20000 + int(200.0 * remaining)
    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            raise TangentialIncidenceError("step budget exhausted")
        sgn = ray.forward_sign
        best_s = math.inf
        best = None
        for i, side in enumerate(poly.sides):
            w = geodesic_intersection(ray, side.geo)
            if w is None:
                continue
            lam_side = side.geo.param_of(w)
            if not (side.lam_lo - SEG_TOL <= lam_side <= side.lam_hi + SEG_TOL):
                continue
            lam_w = ray.param_of(w)
            s = sgn * (lam_w - lam)
            if s < FORWARD_TOL or s >= best_s:
                continue
            u = ray.tangent_at(lam_w)
            u = complex(u.real * sgn, u.imag * sgn)
            if _leaving_rate(side, w, u) >= -1e-14:
                continue
            best_s = s
            best = (i, w, lam_w)
        if best is None or best_s >= remaining:
            lam_end = lam + sgn * remaining
            zf = ray.point_at(lam_end)
            return (
                sheet_id,
                zf,
                ray.angle_at(lam_end),
                elapsed + remaining,
                nlp,
                decision_count,
                None,
            )
        i, w, lam_w = best
        side = poly.sides[i]
        theta_w = ray.angle_at(lam_w)
        elapsed += best_s
        remaining -= best_s
        if side.kind == "pair":
            z2, a2 = _apply_pose(side.transform, w, theta_w)
            z2, a2 = _reduce_pose(poly, z2, a2)
            ray = Geodesic.from_point_angle(z2, a2)
            lam = ray.param_of(z2)
            continue

        # boundary side: a branch circle (or a circle-free escape end)
        psi = angle_between(theta_w, side.geo.angle_at(side.geo.param_of(w)))
        if psi < ANGLE_TOL or math.pi - psi < ANGLE_TOL:
            raise TangentialIncidenceError(f"tangential incidence (angle {psi})")
        if elapsed - last_event_at < GAP_TOL:
            raise TangentialIncidenceError("consecutive crossings too close")
        end_id = sheet.end_id_by_index[side.end_index]
        options = realized.decisions[(sheet_id, end_id)]
        if not options:
            # escape: the funnel beyond a circle-free end is geodesically
            # convex, so nothing further can happen on this trajectory
            return (
                sheet_id,
                w,
                theta_w,
                elapsed + remaining,
                nlp,
                decision_count,
                end_id,
            )
        u = stream.draw(decision_count)
        decision_count += 1
        acc = 0.0
        chosen = options[-1]
        for opt in options:
            acc += opt.probability
            if u < acc:
                chosen = opt
                break
        nlp -= math.log(chosen.probability)
        if events is not None:
            events.append(
                (elapsed, chosen.curve_id, sheet_id, chosen.to_sheet, psi,
                 chosen.probability)
            )
        last_event_at = elapsed

        # move the crossing point to the canonical axis lift, glue, and
        # deck-reduce the target axis parameter toward the basepoint
        z1 = side.to_canonical(w)
        target_sheet = realized.sheets[chosen.to_sheet]
        target_len = target_sheet.ends[chosen.to_end].length
        t_par = math.log(abs(chosen.pre_map(z1)))
        k = round(t_par / target_len)
        total = chosen.from_normalized.compose(
            Isometry.translation_along_imaginary_axis(-k * target_len)
        ).compose(chosen.pre_map).compose(side.to_canonical)
        z2, a2 = _apply_pose(total, w, theta_w)
        sheet_id = chosen.to_sheet
        sheet = target_sheet
        poly = sheet.polygon
        z2, a2 = _reduce_pose(poly, z2, a2)
        ray = Geodesic.from_point_angle(z2, a2)
        lam = ray.param_of(z2)


def trace(
    realized: RealizedSurface,
    state: FlowState,
    target_length: float,
    stream: DecisionStream,
) -> FlowState:
    """Advance a flow state by exactly target_length."""
    if target_length < 0:
        raise ValueError("target length must be nonnegative")
    if state.escaped_end is not None:
        return replace(state, elapsed=state.elapsed + target_length)
    events: list = []
    sid, zf, af, advanced, nlp, ndec, escaped = _walk(
        realized,
        state.sheet_id,
        state.position.as_complex(),
        state.angle,
        target_length,
        state.decision_count,
        stream,
        events,
    )
    history = state.history + tuple(
        CrossingEvent(
            curve_id=c,
            from_sheet=fs,
            to_sheet=ts,
            arclength=state.elapsed + t,
            incidence_angle=ang,
            probability=p,
        )
        for (t, c, fs, ts, ang, p) in events
    )
    return FlowState(
        sheet_id=sid,
        position=UhpPoint(zf.real, zf.imag),
        angle=af % (2.0 * math.pi),
        elapsed=state.elapsed + advanced,
        neg_log_prob=state.neg_log_prob + nlp,
        decision_count=ndec,
        history=history,
        escaped_end=escaped,
    )


def sample_initial(
    realized: RealizedSurface, seed: int, trajectory: int = 0
) -> FlowState:
    """Stationary initial condition: sheet by degree-weighted area,
    position uniform for hyperbolic area (rejection sampling in the
    fundamental polygon), direction uniform on the circle."""
    gen = DecisionStream(seed, trajectory).init_generator()
    weights = realized.sheet_weights()
    u = gen.random()
    acc = 0.0
    sheet_id = weights[-1][0]
    for sid, wgt in weights:
        acc += wgt
        if u < acc:
            sheet_id = sid
            break
    poly = realized.sheets[sheet_id].polygon
    x0, x1, y0, y1 = poly.bounding_box()
    inv_lo, inv_hi = 1.0 / y1, 1.0 / y0
    for _ in range(100000):
        ux, uy = gen.random(), gen.random()
        x = x0 + ux * (x1 - x0)
        y = 1.0 / (inv_lo + uy * (inv_hi - inv_lo))
        z = complex(x, y)
        if all(s.inside_margin(z) > 1e-12 for s in poly.sides):
            angle = 2.0 * math.pi * gen.random()
            return FlowState(
                sheet_id=sheet_id, position=UhpPoint(x, y), angle=angle
            )
    raise RuntimeError("rejection sampling failed; degenerate polygon?")
