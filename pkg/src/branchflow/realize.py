"""Realize a branched-surface spec as glued Fuchsian sheets.

Each sheet gets its own chart of the hyperbolic plane with a Fuchsian
realization and core fundamental polygon.  Every boundary end carries a
canonical frame: its axis oriented with the sheet on the left, and a
normalizer taking (axis, foot of the polygon center) to the upward
imaginary axis at i.  Crossing a branch circle from one sheet into
another is then the fixed involution z -> -e^twist / z conjugated by
the two end normalizers; it reverses the circle orientation (the sheets
sit on opposite sides) and offsets arclength by the twist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .fuchsian import (
    PANTS,
    TORUS,
    FuchsianSheetRealization,
    build_one_holed_torus,
    build_pair_of_pants,
)
from .growth import sheet_area
from .halfplane import Geodesic, Isometry, normalizer_to_imaginary_axis
from .model import BranchedSurfaceSpec, require_valid

LENGTH_TOL = 1e-9


class RealizeError(ValueError):
    pass


def flip_across_axis(twist: float) -> Isometry:
    """The gluing involution in normalized coordinates: z -> -e^twist / z.

    It maps the point at axis arclength s to the one at twist - s and
    swaps the two sides of the axis.
    """
    e = math.exp(twist / 2.0)
    return Isometry(0.0, -e, 1.0 / e, 0.0)


@dataclass(frozen=True)
class EndFrame:
    end_id: str
    length: float
    axis: Geodesic            # oriented so the sheet lies on its left
    normalizer: Isometry      # axis -> (0, inf) upward, foot of center -> i
    normalizer_inv: Isometry
    dangling: bool


@dataclass(frozen=True)
class Decision:
    curve_id: str
    probability: float
    to_sheet: str
    to_end: str
    from_side: str            # "left" when leaving via the pair's first slot
    pre_map: Isometry         # flip(twist) . N_source: chart -> normalized target axis
    from_normalized: Isometry  # N_target^-1: normalized -> target chart

    @property
    def base_map(self) -> Isometry:
        """Full gluing map source chart -> target chart (no deck reduction)."""
        return self.from_normalized.compose(self.pre_map)


@dataclass(frozen=True)
class RealizedSheet:
    sheet_id: str
    degree: float
    area: float
    realization: FuchsianSheetRealization
    ends: dict[str, EndFrame]
    end_id_by_index: tuple[str, ...]

    @property
    def polygon(self):
        return self.realization.domain


@dataclass(frozen=True)
class RealizedSurface:
    spec: BranchedSurfaceSpec
    sheets: dict[str, RealizedSheet]
    decisions: dict[tuple[str, str], tuple[Decision, ...]]
    mass: float

    def sheet_weights(self) -> list[tuple[str, float]]:
        """Sheets with stationary weights degree * area / mass."""
        return [
            (sid, sh.degree * sh.area / self.mass)
            for sid, sh in sorted(self.sheets.items())
        ]


def _build_sheet(spec: BranchedSurfaceSpec, sheet) -> RealizedSheet:
    ends = sheet.boundary_ends
    lengths = [spec.require(sheet.boundary_lengths[e]) for e in ends]
    if sheet.genus == 1 and len(ends) == 1:
        real = build_one_holed_torus(lengths[0])
    elif sheet.genus == 0 and len(ends) == 3:
        real = build_pair_of_pants(*lengths)
    else:
        raise RealizeError(
            f"sheet {sheet.id!r}: only one-holed tori and pairs of pants are "
            f"realizable, not genus {sheet.genus} with {len(ends)} ends"
        )
    real = real.with_sheet_id(sheet.id)
    center = real.domain.center
    frames: dict[str, EndFrame] = {}
    for idx, end_id in enumerate(ends):
        elt = real.boundary_axes[idx]
        axis = elt.axis()
        if axis.side_of(center) < 0:
            axis = axis.reversed()
        n = normalizer_to_imaginary_axis(axis, center)
        frames[end_id] = EndFrame(
            end_id=end_id,
            length=lengths[idx],
            axis=axis,
            normalizer=n,
            normalizer_inv=n.inverse(),
            dangling=not spec.slots_at_end(sheet.id, end_id),
        )
    return RealizedSheet(
        sheet_id=sheet.id,
        degree=sheet.cycle_degree,
        area=sheet_area(sheet.genus, len(ends)),
        realization=real,
        ends=frames,
        end_id_by_index=tuple(ends),
    )


def realize(spec: BranchedSurfaceSpec, mode: str = "strict") -> RealizedSurface:
    """Build sheet realizations and the gluing maps across every circle."""
    require_valid(spec, mode=mode)
    sheets = {s.id: _build_sheet(spec, s) for s in spec.sheets}
    total_mass = sum(sh.degree * sh.area for sh in sheets.values())

    # check circle lengths against both glued ends
    for c in spec.branch_curves:
        clen = spec.require(c.length)
        for sid, eid in c.crossing_pair:
            elen = sheets[sid].ends[eid].length
            if abs(elen - clen) > LENGTH_TOL * max(1.0, clen):
                raise RealizeError(
                    f"circle {c.id!r}: length {clen} does not match end "
                    f"{sid}/{eid} of length {elen}"
                )

    decisions: dict[tuple[str, str], tuple[Decision, ...]] = {}
    for s in spec.sheets:
        for end_id in s.boundary_ends:
            slots = spec.slots_at_end(s.id, end_id)
            if not slots:
                decisions[(s.id, end_id)] = ()
                continue
            total = sum(c.degree for c, _ in slots)
            entries = []
            for c, slot in sorted(slots, key=lambda t: (t[0].id, t[1])):
                to_sheet, to_end = c.crossing_pair[1 - slot]
                n_src = sheets[s.id].ends[end_id].normalizer
                n_dst_inv = sheets[to_sheet].ends[to_end].normalizer_inv
                pre = flip_across_axis(spec.twist_of(c.id)).compose(n_src)
                entries.append(
                    Decision(
                        curve_id=c.id,
                        probability=c.degree / total,
                        to_sheet=to_sheet,
                        to_end=to_end,
                        from_side="left" if slot == 0 else "right",
                        pre_map=pre,
                        from_normalized=n_dst_inv,
                    )
                )
            decisions[(s.id, end_id)] = tuple(entries)

    return RealizedSurface(
        spec=spec, sheets=sheets, decisions=decisions, mass=total_mass
    )
