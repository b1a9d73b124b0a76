"""Data model for branched hyperbolic surfaces with fundamental cycles.

A branched surface is described combinatorially: sheets (ordinary
hyperbolic surfaces with boundary ends) carrying a positive cycle
degree, and branch circles, each smoothly joining a pair of sheet ends
and carrying its own degree plus the degrees just left and right of it.
Lengths may be numbers or named parameters bound in a single map.

The switch condition -- at every sheet end the incident circle degrees
sum to the sheet degree -- is what makes the crossing probabilities of
the non-deterministic geodesic flow well defined.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

from .growth import sheet_area

SOURCE_TAGS = ("boundary-circle", "nonadjacent-pair")

REL_TOL = 1e-9

Length = float | str  # a number, or the name of a parameter


class InvalidSpecError(ValueError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        msgs = "; ".join(v.message for v in report.violations[:4])
        super().__init__(f"invalid branched-surface spec: {msgs}")


@dataclass(frozen=True)
class SheetSpec:
    id: str
    genus: int
    boundary_ends: tuple[str, ...]
    boundary_lengths: dict[str, Length]
    cycle_degree: float

    def end_ids(self) -> tuple[str, ...]:
        return self.boundary_ends


@dataclass(frozen=True)
class BranchCurveSpec:
    id: str
    length: Length
    degree: float
    deg_left: float
    deg_right: float
    crossing_pair: tuple[tuple[str, str], tuple[str, str]]
    source: str = "boundary-circle"


@dataclass(frozen=True)
class BranchedSurfaceSpec:
    sheets: tuple[SheetSpec, ...]
    branch_curves: tuple[BranchCurveSpec, ...]
    twists: dict[str, float] = field(default_factory=dict)
    parameters: dict[str, float] = field(default_factory=dict)

    def sheet(self, sheet_id: str) -> SheetSpec:
        for s in self.sheets:
            if s.id == sheet_id:
                return s
        raise KeyError(f"no sheet {sheet_id!r}")

    def curve(self, curve_id: str) -> BranchCurveSpec:
        for c in self.branch_curves:
            if c.id == curve_id:
                return c
        raise KeyError(f"no branch curve {curve_id!r}")

    def resolve(self, value: Length) -> float | None:
        """Numeric value of a length, or None if the parameter is unbound."""
        if isinstance(value, str):
            return self.parameters.get(value)
        return float(value)

    def require(self, value: Length) -> float:
        v = self.resolve(value)
        if v is None:
            raise ValueError(f"length parameter {value!r} is not bound")
        return v

    def twist_of(self, curve_id: str) -> float:
        return self.twists.get(curve_id, 0.0)

    def slots_at_end(self, sheet_id: str, end_id: str):
        """Branch-curve slots incident to a sheet end, as (curve, slot) pairs.

        A curve joining an end to itself contributes both slots.
        """
        out = []
        for c in self.branch_curves:
            for slot in (0, 1):
                if c.crossing_pair[slot] == (sheet_id, end_id):
                    out.append((c, slot))
        return out

    def with_parameters(self, **bindings: float) -> "BranchedSurfaceSpec":
        params = dict(self.parameters)
        params.update(bindings)
        return replace(self, parameters=params)


@dataclass(frozen=True)
class Violation:
    rule: str
    element: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]
    warnings: tuple[Violation, ...]

    def messages(self) -> list[str]:
        return [f"[{v.rule}] {v.element}: {v.message}" for v in self.violations]


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= REL_TOL * max(1.0, abs(x), abs(y))


def validate(spec: BranchedSurfaceSpec, mode: str = "strict") -> ValidationReport:
    """Check every structural invariant; violations are reported, not thrown."""
    if mode not in ("strict", "free"):
        raise ValueError("mode must be 'strict' or 'free'")
    bad: list[Violation] = []
    warn: list[Violation] = []

    seen = set()
    for s in spec.sheets:
        if s.id in seen:
            bad.append(Violation("sheet-id-unique", s.id, "duplicate sheet id"))
        seen.add(s.id)
        chi = 2 - 2 * s.genus - len(s.boundary_ends)
        if s.genus < 0 or chi >= 0:
            bad.append(
                Violation(
                    "sheet-hyperbolic-type",
                    s.id,
                    f"genus {s.genus} with {len(s.boundary_ends)} ends is not hyperbolic",
                )
            )
        if not s.cycle_degree > 0:
            bad.append(
                Violation("sheet-degree-positive", s.id, "cycle degree must be > 0")
            )
        for e in s.boundary_ends:
            if e not in s.boundary_lengths:
                bad.append(
                    Violation("end-length-missing", f"{s.id}/{e}", "no declared length")
                )
            else:
                v = spec.resolve(s.boundary_lengths[e])
                if v is not None and not v > 0:
                    bad.append(
                        Violation(
                            "end-length-positive", f"{s.id}/{e}", f"length {v} <= 0"
                        )
                    )

    seen = set()
    for c in spec.branch_curves:
        if c.id in seen:
            bad.append(Violation("curve-id-unique", c.id, "duplicate curve id"))
        seen.add(c.id)
        if not c.degree > 0:
            bad.append(Violation("curve-degree-positive", c.id, "degree must be > 0"))
        if c.degree > c.deg_left * (1 + REL_TOL) or c.degree > c.deg_right * (1 + REL_TOL):
            bad.append(
                Violation(
                    "curve-prob",
                    c.id,
                    f"degree {c.degree} exceeds a side degree "
                    f"(dl={c.deg_left}, dr={c.deg_right}): crossing probability > 1",
                )
            )
        lv = spec.resolve(c.length)
        if lv is not None and not lv > 0:
            bad.append(Violation("curve-length-positive", c.id, f"length {lv} <= 0"))
        if c.source not in SOURCE_TAGS:
            bad.append(Violation("curve-source", c.id, f"unknown source {c.source!r}"))
        for slot in (0, 1):
            sid, eid = c.crossing_pair[slot]
            try:
                sh = spec.sheet(sid)
            except KeyError:
                bad.append(
                    Violation("crossing-ref", c.id, f"unknown sheet {sid!r}")
                )
                continue
            if eid not in sh.boundary_ends:
                bad.append(
                    Violation("crossing-ref", c.id, f"sheet {sid!r} has no end {eid!r}")
                )
                continue
            # curve length must agree with the end's declared boundary length
            el = sh.boundary_lengths.get(eid)
            if el is not None and not _lengths_agree(spec, c.length, el):
                bad.append(
                    Violation(
                        "length-consistency",
                        c.id,
                        f"curve length {c.length!r} differs from the declared "
                        f"length {el!r} of end {sid}/{eid}",
                    )
                )
            if mode == "strict":
                side_deg = c.deg_left if slot == 0 else c.deg_right
                if not _close(side_deg, sh.cycle_degree):
                    side = "deg_left" if slot == 0 else "deg_right"
                    bad.append(
                        Violation(
                            "side-degree",
                            c.id,
                            f"{side}={side_deg} differs from degree "
                            f"{sh.cycle_degree} of adjacent sheet {sid!r}",
                        )
                    )
        tw = spec.twists.get(c.id)
        if tw is not None:
            lv = spec.resolve(c.length)
            if tw < 0 or (lv is not None and tw >= lv):
                bad.append(
                    Violation("twist-range", c.id, f"twist {tw} outside [0, length)")
                )

    # switch condition and dangling ends
    for s in spec.sheets:
        for e in s.boundary_ends:
            slots = spec.slots_at_end(s.id, e)
            if not slots:
                warn.append(
                    Violation(
                        "dangling-end",
                        f"{s.id}/{e}",
                        "end lies on no branch circle; geodesics reaching it "
                        "escape and never return",
                    )
                )
                continue
            total = sum(c.degree for c, _ in slots)
            if not _close(total, s.cycle_degree):
                bad.append(
                    Violation(
                        "switch-condition",
                        f"{s.id}/{e}",
                        f"incident circle degrees sum to {total}, "
                        f"sheet degree is {s.cycle_degree}",
                    )
                )

    if not spec.branch_curves:
        warn.append(Violation("no-branch-curves", "-", "spec has no branch circles"))

    return ValidationReport(ok=not bad, violations=tuple(bad), warnings=tuple(warn))


def _lengths_agree(spec: BranchedSurfaceSpec, a: Length, b: Length) -> bool:
    if isinstance(a, str) and isinstance(b, str) and a == b:
        return True
    va, vb = spec.resolve(a), spec.resolve(b)
    if va is None or vb is None:
        return False
    return _close(va, vb)


def require_valid(spec: BranchedSurfaceSpec, mode: str = "strict") -> ValidationReport:
    report = validate(spec, mode=mode)
    if not report.ok:
        raise InvalidSpecError(report)
    return report


def mass(spec: BranchedSurfaceSpec, mode: str = "strict") -> float:
    """Total cycle-weighted area: sum of degree x Gauss-Bonnet sheet area."""
    require_valid(spec, mode=mode)
    return sum(
        s.cycle_degree * sheet_area(s.genus, len(s.boundary_ends))
        for s in spec.sheets
    )


def rescale_cycle(spec: BranchedSurfaceSpec, factor: float) -> BranchedSurfaceSpec:
    """Multiply every cycle degree (sheet and circle, both sides) by factor.

    Fundamental cycles form a cone, so this preserves validity; every
    downstream growth quantity is invariant because it depends only on
    degree ratios.
    """
    if not factor > 0:
        raise ValueError("rescale factor must be positive")
    sheets = tuple(
        replace(s, cycle_degree=s.cycle_degree * factor) for s in spec.sheets
    )
    curves = tuple(
        replace(
            c,
            degree=c.degree * factor,
            deg_left=c.deg_left * factor,
            deg_right=c.deg_right * factor,
        )
        for c in spec.branch_curves
    )
    return replace(spec, sheets=sheets, branch_curves=curves)


def family_tori_on_solid_torus(n: int) -> BranchedSurfaceSpec:
    """The n-tori family: n one-holed tori joined along one circle.

    Every unordered pair of sheets is joined by one branch circle of
    degree 1/(n-1); sheets have degree 1, so the switch condition holds
    by construction.  All circles share the symbolic length "a".
    Pairs adjacent in the circular order arise as boundary circles, the
    rest as bridges between non-adjacent sheets.
    """
    if n < 3:
        raise ValueError("the family needs n >= 3 tori")
    sheets = tuple(
        SheetSpec(
            id=f"t{i}",
            genus=1,
            boundary_ends=("e",),
            boundary_lengths={"e": "a"},
            cycle_degree=1.0,
        )
        for i in range(n)
    )
    deg = 1.0 / (n - 1)
    curves = []
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = (j - i == 1) or (j - i == n - 1)
            curves.append(
                BranchCurveSpec(
                    id=f"b{i}_{j}",
                    length="a",
                    degree=deg,
                    deg_left=1.0,
                    deg_right=1.0,
                    crossing_pair=((f"t{i}", "e"), (f"t{j}", "e")),
                    source="boundary-circle" if adjacent else "nonadjacent-pair",
                )
            )
    return BranchedSurfaceSpec(sheets=sheets, branch_curves=tuple(curves))


# --- JSON serialization ----------------------------------------------------


def to_json_dict(spec: BranchedSurfaceSpec) -> dict:
    return {
        "sheets": [
            {
                "id": s.id,
                "genus": s.genus,
                "boundary_ends": list(s.boundary_ends),
                "boundary_lengths": dict(s.boundary_lengths),
                "cycle_degree": s.cycle_degree,
            }
            for s in spec.sheets
        ],
        "branch_curves": [
            {
                "id": c.id,
                "length": c.length,
                "degree": c.degree,
                "deg_left": c.deg_left,
                "deg_right": c.deg_right,
                "crossing_pair": [list(c.crossing_pair[0]), list(c.crossing_pair[1])],
                "source": c.source,
            }
            for c in spec.branch_curves
        ],
        "twists": dict(spec.twists),
        "parameters": dict(spec.parameters),
    }


def from_json_dict(doc: dict) -> BranchedSurfaceSpec:
    try:
        sheets = tuple(
            SheetSpec(
                id=str(s["id"]),
                genus=int(s["genus"]),
                boundary_ends=tuple(str(e) for e in s["boundary_ends"]),
                boundary_lengths={
                    str(k): (v if isinstance(v, str) else float(v))
                    for k, v in s["boundary_lengths"].items()
                },
                cycle_degree=float(s["cycle_degree"]),
            )
            for s in doc["sheets"]
        )
        curves = tuple(
            BranchCurveSpec(
                id=str(c["id"]),
                length=c["length"] if isinstance(c["length"], str) else float(c["length"]),
                degree=float(c["degree"]),
                deg_left=float(c["deg_left"]),
                deg_right=float(c["deg_right"]),
                crossing_pair=(
                    (str(c["crossing_pair"][0][0]), str(c["crossing_pair"][0][1])),
                    (str(c["crossing_pair"][1][0]), str(c["crossing_pair"][1][1])),
                ),
                source=str(c.get("source", "boundary-circle")),
            )
            for c in doc["branch_curves"]
        )
        twists = {str(k): float(v) for k, v in doc.get("twists", {}).items()}
        params = {str(k): float(v) for k, v in doc.get("parameters", {}).items()}
    except (KeyError, TypeError, ValueError, IndexError) as err:
        raise ValueError(f"malformed branched-surface document: {err}") from err
    return BranchedSurfaceSpec(
        sheets=sheets, branch_curves=curves, twists=twists, parameters=params
    )


def dumps(spec: BranchedSurfaceSpec, indent: int | None = 2) -> str:
    return json.dumps(to_json_dict(spec), indent=indent)


def loads(text: str) -> BranchedSurfaceSpec:
    return from_json_dict(json.loads(text))


def load_spec(path: str) -> BranchedSurfaceSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def save_spec(spec: BranchedSurfaceSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(spec))
        fh.write("\n")


def content_hash(spec: BranchedSurfaceSpec) -> str:
    """Stable sha256 of the canonical JSON form, for report traceability."""
    canon = json.dumps(to_json_dict(spec), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()
