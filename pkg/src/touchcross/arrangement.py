"""Combinatorial arrangement: cyclic intersection sequences, arcs, lenses, apexes."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .geometry import (
    CROSSING,
    TOUCHING,
    ClosedCurve,
    GeneralPositionError,
    Point,
    classify_pair,
    side_of,
    validate_general_position,
)

STRICT = "strict"
REPORT_ONLY = "report-only"


class ArrangementError(ValueError):
    pass


class SideConflictError(ArrangementError):
    pass


class SadUndefined(ArrangementError):
    pass


class SameCurveApex(ArrangementError):
    pass


class NotTouching(ArrangementError):
    pass


class NoApex(ArrangementError):
    """The two touching curves are disjoint (possible only in report-only families)."""


@dataclass(frozen=True)
class IntersectionPoint:
    id: int
    curves: tuple[str, str]
    kind: str
    point: Point | None = None

    def other(self, curve: str) -> str:
        a, b = self.curves
        if curve == a:
            return b
        if curve == b:
            return a
        raise ArrangementError(f"point {self.id} is not on curve {curve!r}")


@dataclass(frozen=True)
class CurveRecord:
    id: str
    sequence: tuple[int, ...]
    orientation: int = 1


@dataclass(frozen=True)
class Arc:
    """Closed arc of ``curve`` from ``start`` to ``end`` in traversal order.

    start == end denotes the one-point arc.
    """

    curve: str
    start: int
    end: int


@dataclass(frozen=True)
class Lens:
    arc: Arc
    pair: tuple[str, str]

    @property
    def id(self) -> str:
        return f"L{self.arc.start}@{self.arc.curve}"


@dataclass(frozen=True)
class Arrangement:
    curves: tuple[CurveRecord, ...]
    points: dict[int, IntersectionPoint]
    sad: frozenset[int] | None = None
    _pos: dict = field(init=False, repr=False, compare=False)
    _rec: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_rec", {c.id: c for c in self.curves})
        object.__setattr__(
            self, "_pos", {c.id: {p: i for i, p in enumerate(c.sequence)} for c in self.curves}
        )

    # --- basic views
    @property
    def n(self) -> int:
        return len(self.curves)

    @property
    def X(self) -> frozenset[int]:
        return frozenset(p.id for p in self.points.values() if p.kind == CROSSING)

    @property
    def T(self) -> frozenset[int]:
        return frozenset(p.id for p in self.points.values() if p.kind == TOUCHING)

    @property
    def curve_ids(self) -> list[str]:
        return [c.id for c in self.curves]

    def curve(self, cid: str) -> CurveRecord:
        return self._rec[cid]

    def sequence(self, cid: str) -> tuple[int, ...]:
        return self._rec[cid].sequence

    def position(self, cid: str, pid: int) -> int:
        return self._pos[cid][pid]

    def on_curve(self, cid: str, pid: int) -> bool:
        return pid in self._pos[cid]

    def is_sad(self, pid: int) -> bool:
        if self.sad is None:
            raise SadUndefined("sad set not computed; run classify_happy first")
        return pid in self.sad

    def with_sad(self, sad: Iterable[int]) -> "Arrangement":
        return replace(self, sad=frozenset(sad))

    # --- arcs
    def arc_points(self, arc: Arc) -> list[int]:
        seq = self.sequence(arc.curve)
        i, j = self.position(arc.curve, arc.start), self.position(arc.curve, arc.end)
        steps = (j - i) % len(seq)
        return [seq[(i + s) % len(seq)] for s in range(steps + 1)]

    def pair_points(self, a: str, b: str) -> list[int]:
        return [p for p in self.sequence(a) if self.on_curve(b, p)]


def extract_arrangement(
    family: Sequence[ClosedCurve], mode: str = STRICT, workers: int | None = None
) -> Arrangement:
    """Build the combinatorial arrangement of a family in general position."""
    report = validate_general_position(family, strict=(mode == STRICT), workers=workers)
    if not report.valid:
        raise GeneralPositionError(report)
    points: dict[int, IntersectionPoint] = {}
    per_curve: dict[str, list] = {c.id: [] for c in family}
    for (i, j), hits in sorted(report.hits.items()):
        if not hits:
            continue
        kinds = classify_pair(hits)
        for h, kind in zip(hits, kinds):
            pid = len(points)
            points[pid] = IntersectionPoint(pid, (family[i].id, family[j].id), kind, h.point)
            per_curve[family[i].id].append((h.params[0], pid))
            per_curve[family[j].id].append((h.params[1], pid))
    records = []
    for c in family:
        seq = [pid for _, pid in sorted(per_curve[c.id])]
        if c.orientation < 0 and seq:
            seq = seq[:1] + seq[1:][::-1]
        records.append(CurveRecord(c.id, tuple(seq)))
    return Arrangement(tuple(records), points)


def _reverse_cycle(seq: tuple[int, ...]) -> tuple[int, ...]:
    return seq[:1] + tuple(reversed(seq[1:]))


def orient_curves(arr: Arrangement, family: Sequence[ClosedCurve]) -> Arrangement:
    """Orient every curve so that all curves touching it do so on its right side."""
    geo = {c.id: c for c in family}
    params = _touch_params(arr, family)
    records = []
    for rec in arr.curves:
        sides = set()
        for pid in rec.sequence:
            pt = arr.points[pid]
            if pt.kind != TOUCHING:
                continue
            other = pt.other(rec.id)
            s = side_of(geo[rec.id], params[pid][rec.id], geo[other], params[pid][other])
            sides.add(s * rec.orientation)
        if len(sides) > 1:
            raise SideConflictError(f"curve {rec.id!r} is touched on both sides")
        if sides == {1}:
            rec = CurveRecord(rec.id, _reverse_cycle(rec.sequence), -rec.orientation)
        records.append(rec)
    return replace(arr, curves=tuple(records))


def _touch_params(arr: Arrangement, family: Sequence[ClosedCurve]):
    """(edge, t) of every touching point on both of its curves, recovered exactly."""
    geo = {c.id: c for c in family}
    out: dict[int, dict[str, tuple]] = {}
    for pid, pt in arr.points.items():
        if pt.kind != TOUCHING:
            continue
        out[pid] = {cid: locate(geo[cid], pt.point) for cid in pt.curves}
    return out


def locate(curve: ClosedCurve, p: Point):
    """(edge, t) of point p on curve, vertices reported with t = 0."""
    verts = curve.vertices
    n = len(verts)
    for i, v in enumerate(verts):
        if v == p:
            return i, 0
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        dx, dy = b.x - a.x, b.y - a.y
        if (p.x - a.x) * dy - (p.y - a.y) * dx != 0:
            continue
        t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy)
        if 0 < t < 1:
            return i, t
    raise ArrangementError(f"point {p} not on curve {curve.id!r}")


def arc_length(arr: Arrangement, arc: Arc) -> int:
    """Number of sad touchings on the closed arc, endpoints included."""
    if arr.sad is None:
        raise SadUndefined("sad set not computed; run classify_happy first")
    return sum(1 for p in arr.arc_points(arc) if p in arr.sad)


def enumerate_lenses(arr: Arrangement) -> list[Lens]:
    """For each crossing x of (a, b): the lens on a and the lens on b starting at x."""
    lenses = []
    for rec in arr.curves:
        seq = rec.sequence
        L = len(seq)
        for i, pid in enumerate(seq):
            pt = arr.points[pid]
            if pt.kind != CROSSING:
                continue
            other = pt.other(rec.id)
            for s in range(1, L + 1):
                q = seq[(i + s) % L]
                if arr.on_curve(other, q):
                    lenses.append(Lens(Arc(rec.id, pid, q), tuple(sorted((rec.id, other)))))
                    break
    return lenses


def apex(arr: Arrangement, arc: Arc) -> int:
    """First point of b after t along b', for an arc from touching s (with b) to t (with b')."""
    s, t = arr.points[arc.start], arr.points[arc.end]
    if s.kind != TOUCHING or t.kind != TOUCHING:
        raise NotTouching("apex needs an arc between two touching points")
    b = s.other(arc.curve)
    b2 = t.other(arc.curve)
    if b == b2:
        raise SameCurveApex(f"both endpoints touch curve {b!r}")
    seq = arr.sequence(b2)
    i = arr.position(b2, t.id)
    L = len(seq)
    for step in range(1, L):
        q = seq[(i + step) % L]
        if arr.on_curve(b, q):
            return q
    raise NoApex(f"curves {b!r} and {b2!r} are disjoint")
