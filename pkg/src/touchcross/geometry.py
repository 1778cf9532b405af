"""Exact planar kernel for families of closed polylines.

Every coordinate is a ``Fraction``. Pairwise intersection works on an
integer-scaled copy of the two curves (common denominator), so all
predicates are sign tests on Python integers; there are no tolerances.
"""
from __future__ import annotations

import os
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import NamedTuple, Sequence

TANGENTIAL = "tangential"
TRANSVERSAL = "transversal"
TOUCHING = "touching"
CROSSING = "crossing"


class GeometryError(ValueError):
    pass


class InvalidCurveError(GeometryError):
    pass


class OverlapError(GeometryError):
    """Two curves share a one-dimensional piece."""


class ParityError(GeometryError):
    """A pair of closed curves meets in a single transversal point."""


class GeneralPositionError(GeometryError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        kinds = sorted({v.kind for v in report.violations})
        super().__init__(f"family violates general position: {', '.join(kinds)}")


class Point(NamedTuple):
    x: Fraction
    y: Fraction


def point(x, y) -> Point:
    return Point(Fraction(x), Fraction(y))


def cross(ax, ay, bx, by):
    return ax * by - ay * bx


@dataclass(frozen=True)
class ClosedCurve:
    """Closed polyline; the last vertex connects back to the first.

    ``orientation`` is +1 to traverse in vertex order, -1 for the reverse.
    """

    id: str
    vertices: tuple[Point, ...]
    orientation: int = 1
    _scale: int = field(init=False, repr=False, compare=False)
    _ints: tuple[tuple[int, int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        verts = tuple(point(v[0], v[1]) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise InvalidCurveError(f"curve {self.id!r}: need at least 3 vertices")
        if self.orientation not in (1, -1):
            raise InvalidCurveError(f"curve {self.id!r}: orientation must be +1 or -1")
        for i, v in enumerate(verts):
            if v == verts[(i + 1) % len(verts)]:
                raise InvalidCurveError(f"curve {self.id!r}: repeated vertex at index {i}")
        scale = 1
        for v in verts:
            scale = lcm(scale, v.x.denominator, v.y.denominator)
        object.__setattr__(self, "_scale", scale)
        object.__setattr__(
            self,
            "_ints",
            tuple((int(v.x * scale), int(v.y * scale)) for v in verts),
        )

    def __len__(self):
        return len(self.vertices)

    def scaled(self, scale: int) -> list[tuple[int, int]]:
        f = scale // self._scale
        return [(x * f, y * f) for x, y in self._ints]

    def point_at(self, edge: int, t: Fraction) -> Point:
        p = self.vertices[edge]
        q = self.vertices[(edge + 1) % len(self.vertices)]
        return Point(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))

    def reversed(self) -> "ClosedCurve":
        return ClosedCurve(self.id, self.vertices, -self.orientation)


@dataclass(frozen=True)
class LocalIntersection:
    point: Point
    curves: tuple[str, str]
    local_type: str
    # per curve, (edge index, parameter in [0, 1)); vertices always use t = 0
    params: tuple[tuple[int, Fraction], tuple[int, Fraction]]

    def param_of(self, curve_id: str) -> tuple[int, Fraction]:
        return self.params[self.curves.index(curve_id)]


# ---------------------------------------------------------------- predicates

def _half(ux, uy, dx, dy):
    c = ux * dy - uy * dx
    if c == 0:
        return 0 if ux * dx + uy * dy > 0 else 2
    return 1 if c > 0 else 3


def _ccw_before(u, d1, d2) -> bool:
    """True if d1 comes strictly before d2 turning counter-clockwise from u."""
    h1 = _half(u[0], u[1], d1[0], d1[1])
    h2 = _half(u[0], u[1], d2[0], d2[1])
    if h1 != h2:
        return h1 < h2
    if h1 in (0, 2):
        return False
    return cross(d1[0], d1[1], d2[0], d2[1]) > 0


def in_open_sector(d, u, v) -> bool:
    """Direction d lies strictly inside the ccw sector from u to v."""
    if _half(u[0], u[1], d[0], d[1]) == 0:
        return False
    return _ccw_before(u, d, v)


def _same_direction(d1, d2) -> bool:
    return cross(d1[0], d1[1], d2[0], d2[1]) == 0 and d1[0] * d2[0] + d1[1] * d2[1] > 0


def branch_directions(verts, edge: int, t) -> tuple[tuple, tuple]:
    """(backward, forward) directions of the curve at (edge, t), vertex order."""
    n = len(verts)
    p = verts[edge]
    q = verts[(edge + 1) % n]
    if t == 0:
        r = verts[edge - 1]
        return (r[0] - p[0], r[1] - p[1]), (q[0] - p[0], q[1] - p[1])
    return (p[0] - q[0], p[1] - q[1]), (q[0] - p[0], q[1] - p[1])


def local_type(a_dirs, b_dirs) -> str:
    a_in, a_out = a_dirs
    for d in b_dirs:
        if _same_direction(d, a_in) or _same_direction(d, a_out):
            raise OverlapError("curves leave a common point along the same ray")
    left_in = in_open_sector(b_dirs[0], a_out, a_in)
    left_out = in_open_sector(b_dirs[1], a_out, a_in)
    return TRANSVERSAL if left_in != left_out else TANGENTIAL


def side_of(a: ClosedCurve, a_param, b: ClosedCurve, b_param) -> int:
    """+1 if b lies on the left of a (a traversed in its own orientation), -1 if right.

    Only meaningful at a tangential meeting.
    """
    a_in, a_out = branch_directions(a.vertices, *a_param)
    b_in, _ = branch_directions(b.vertices, *b_param)
    if a.orientation < 0:
        a_in, a_out = a_out, a_in
    return 1 if in_open_sector(b_in, a_out, a_in) else -1


# ------------------------------------------------------- segment intersection

def _segment_hits(p, p2, q, q2, what: str):
    """Exact intersection of closed segments pq. Returns list of (t, u) params."""
    rx, ry = p2[0] - p[0], p2[1] - p[1]
    sx, sy = q2[0] - q[0], q2[1] - q[1]
    qpx, qpy = q[0] - p[0], q[1] - p[1]
    den = rx * sy - ry * sx
    if den == 0:
        if qpx * ry - qpy * rx != 0:
            return []
        rr = rx * rx + ry * ry
        ss = sx * sx + sy * sy
        t0 = Fraction(qpx * rx + qpy * ry, rr)
        t1 = t0 + Fraction(sx * rx + sy * ry, rr)
        lo, hi = max(min(t0, t1), 0), min(max(t0, t1), 1)
        if lo > hi:
            return []
        if lo < hi:
            raise OverlapError(f"{what}: collinear edges overlap")
        # single shared endpoint
        px, py = p[0] + lo * rx, p[1] + lo * ry
        u = Fraction((px - q[0]) * sx + (py - q[1]) * sy) / ss
        return [(lo, u)]
    t_num = qpx * sy - qpy * sx
    u_num = qpx * ry - qpy * rx
    if den < 0:
        den, t_num, u_num = -den, -t_num, -u_num
    if 0 <= t_num <= den and 0 <= u_num <= den:
        return [(Fraction(t_num, den), Fraction(u_num, den))]
    return []


def _boxes(verts):
    n = len(verts)
    out = []
    for i in range(n):
        (x1, y1), (x2, y2) = verts[i], verts[(i + 1) % n]
        out.append((min(x1, x2), max(x1, x2), min(y1, y2), max(y1, y2)))
    return out


def candidate_edge_pairs(verts_a, verts_b):
    """Edge pairs with overlapping bounding boxes (x-sorted sweep)."""
    ba, bb = _boxes(verts_a), _boxes(verts_b)
    events = sorted(
        [(box[0], 0, i) for i, box in enumerate(ba)] + [(box[0], 1, j) for j, box in enumerate(bb)]
    )
    active = ([], [])
    boxes = (ba, bb)
    out = []
    for xmin, side, idx in events:
        other = 1 - side
        alive = [k for k in active[other] if boxes[other][k][1] >= xmin]
        active[other][:] = alive
        _, _, ylo, yhi = boxes[side][idx]
        for k in alive:
            obox = boxes[other][k]
            if obox[2] <= yhi and ylo <= obox[3]:
                out.append((idx, k) if side == 0 else (k, idx))
        active[side].append(idx)
    return out


def _normalize(edge, t, n):
    if t == 1:
        return (edge + 1) % n, Fraction(0)
    return edge, t


def intersect_pair(a: ClosedCurve, b: ClosedCurve) -> list[LocalIntersection]:
    """All common points of a and b, sorted by position along a."""
    if a.id == b.id:
        raise GeometryError("intersect_pair needs two distinct curves")
    scale = lcm(a._scale, b._scale)
    va, vb = a.scaled(scale), b.scaled(scale)
    na, nb = len(va), len(vb)
    found: dict[tuple, tuple] = {}
    for i, j in candidate_edge_pairs(va, vb):
        p, p2 = va[i], va[(i + 1) % na]
        q, q2 = vb[j], vb[(j + 1) % nb]
        for t, u in _segment_hits(p, p2, q, q2, f"{a.id}/{b.id}"):
            key = (p[0] + t * (p2[0] - p[0]), p[1] + t * (p2[1] - p[1]))
            if key not in found:
                found[key] = (_normalize(i, t, na), _normalize(j, u, nb))
    out = []
    for key, (pa, pb) in found.items():
        kind = local_type(branch_directions(va, *pa), branch_directions(vb, *pb))
        pt = Point(Fraction(key[0]) / scale, Fraction(key[1]) / scale)
        out.append(LocalIntersection(pt, (a.id, b.id), kind, (pa, pb)))
    out.sort(key=lambda h: h.params[0])
    return out


def check_simple(curve: ClosedCurve) -> None:
    """Raise InvalidCurveError unless the polyline is simple."""
    v = curve.scaled(curve._scale)
    n = len(v)
    for i, j in candidate_edge_pairs(v, v):
        if i >= j:
            continue
        p, p2, q, q2 = v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]
        try:
            hits = _segment_hits(p, p2, q, q2, curve.id)
        except OverlapError:
            raise InvalidCurveError(f"curve {curve.id!r}: edges {i} and {j} overlap") from None
        for t, u in hits:
            if j == i + 1 and t == 1 and u == 0:
                continue
            if i == 0 and j == n - 1 and t == 0 and u == 1:
                continue
            raise InvalidCurveError(f"curve {curve.id!r}: edges {i} and {j} intersect")


# ------------------------------------------------------------ classification

def classify_pair(hits: Sequence[LocalIntersection]) -> list[str]:
    """Pair-level kinds: a lone tangential point is a touching, all else crossings."""
    if not hits:
        raise GeometryError("classify_pair needs at least one intersection")
    if len(hits) == 1:
        if hits[0].local_type == TRANSVERSAL:
            raise ParityError(f"curves {hits[0].curves} meet in a single transversal point")
        return [TOUCHING]
    return [CROSSING] * len(hits)


@dataclass(frozen=True)
class Violation:
    kind: str  # triple_point | overlap | disjoint_pair | single_transversal | invalid_curve
    curves: tuple[str, ...]
    point: Point | None = None
    detail: str = ""


@dataclass
class ValidationReport:
    violations: list[Violation]
    hits: dict[tuple[int, int], list[LocalIntersection]]
    strict: bool = True

    @property
    def valid(self) -> bool:
        return not self.violations


def _pair_job(args):
    a, b = args
    try:
        return intersect_pair(a, b), None
    except OverlapError as exc:
        return None, str(exc)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("TOUCHCROSS_THREADS", "1")))
    except ValueError:
        return 1


def all_pair_hits(family: Sequence[ClosedCurve], workers: int | None = None):
    """Intersect every pair; returns {(i, j): hits or error string}, sorted by pair."""
    pairs = list(combinations(range(len(family)), 2))
    jobs = [(family[i], family[j]) for i, j in pairs]
    workers = default_workers() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_pair_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_pair_job(j) for j in jobs]
    return dict(zip(pairs, results))


def validate_general_position(
    family: Sequence[ClosedCurve], strict: bool = True, workers: int | None = None,
    check_curves: bool = True,
) -> ValidationReport:
    violations: list[Violation] = []
    ids = [c.id for c in family]
    if len(set(ids)) != len(ids):
        violations.append(Violation("invalid_curve", tuple(ids), detail="duplicate curve ids"))
    if check_curves:
        for c in family:
            try:
                check_simple(c)
            except InvalidCurveError as exc:
                violations.append(Violation("invalid_curve", (c.id,), detail=str(exc)))
    results = all_pair_hits(family, workers)
    hits: dict[tuple[int, int], list[LocalIntersection]] = {}
    on_point: dict[Point, set[str]] = defaultdict(set)
    for (i, j), (pair_hits, err) in results.items():
        pair = (family[i].id, family[j].id)
        if err is not None:
            violations.append(Violation("overlap", pair, detail=err))
            continue
        hits[(i, j)] = pair_hits
        for h in pair_hits:
            on_point[h.point].update(pair)
        if not pair_hits:
            if strict:
                violations.append(Violation("disjoint_pair", pair))
        elif len(pair_hits) == 1 and pair_hits[0].local_type == TRANSVERSAL:
            violations.append(Violation("single_transversal", pair, pair_hits[0].point))
    for pt in sorted(on_point):
        if len(on_point[pt]) >= 3:
            owners = tuple(c for c in ids if c in on_point[pt])
            violations.append(Violation("triple_point", owners, pt))
    return ValidationReport(violations, hits, strict)
