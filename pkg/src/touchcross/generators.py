"""Curve families with known ground truth.

Every vertex is rational, and every designed tangency is a shared vertex whose
neighbourhood lies on one side of the other curve, so it is exact.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .geometry import (
    CROSSING,
    TANGENTIAL,
    TOUCHING,
    ClosedCurve,
    GeometryError,
    Point,
    _segment_hits,
    branch_directions,
    classify_pair,
    in_open_sector,
    local_type,
    point,
    validate_general_position,
)


class InfeasibleParams(ValueError):
    pass


class EpsilonTooLarge(ValueError):
    pass


DEFAULT_RESOLUTION = 64


def unit_vector(theta: float, den: int = 1000) -> tuple[Fraction, Fraction]:
    """Rational point on the unit circle near angle theta (radians)."""
    theta = math.remainder(theta, 2 * math.pi)
    flip = abs(theta) > math.pi / 2
    if flip:
        theta = math.copysign(math.pi, theta) - theta
    t = Fraction(math.tan(theta / 2)).limit_denominator(den)
    x, y = (1 - t * t) / (1 + t * t), 2 * t / (1 + t * t)
    return (-x, y) if flip else (x, y)


def circle_polygon(cid, centre, radius, resolution, extra=()) -> ClosedCurve:
    """Convex polygon inscribed in a circle; ``extra`` unit vectors become vertices too."""
    cx, cy = Fraction(centre[0]), Fraction(centre[1])
    dirs = {unit_vector(2 * math.pi * i / resolution) for i in range(resolution)}
    dirs.update((Fraction(u[0]), Fraction(u[1])) for u in extra)
    ordered = sorted(dirs, key=lambda u: math.atan2(u[1], u[0]))
    return ClosedCurve(cid, tuple((cx + radius * ux, cy + radius * uy) for ux, uy in ordered))


def _check_resolution(resolution):
    if resolution < 8:
        raise InfeasibleParams("resolution must be at least 8")


# ------------------------------------------------------------ counterexample

def _touch_dirs(count: int):
    """Touch directions near the top of a circle, left to right."""
    if count == 1:
        return [(Fraction(0), Fraction(1))]
    return [unit_vector(math.radians(105 - 30 * i / (count - 1))) for i in range(count)]


def _comb_paths(q: int, m: int, dirs) -> list[list[tuple]]:
    """q combs above a row of m circles; every pair crosses once per circle.

    Between circles the combs pass at staggered heights whose order flips at
    each circle. With m odd a short zone of sloped segments restores the order
    before the return path, adding one crossing per pair.
    """

    def height(r, j):
        base = r if j % 2 == 0 else q - 1 - r
        return 3 + base + Fraction((3 * r * r + 5 * j + r * j) % 17, 40)

    paths = []
    for r in range(q):
        pts = []
        for g in range(m):
            pts.append((4 * g - 2, height(r, g)))
            dx, dy = dirs[r] if g % 2 == 0 else dirs[q - 1 - r]
            pts.append((4 * g + dx, dy))
        x_end, y_end = 4 * m - 2, height(r, m)
        pts.append((x_end, y_end))
        if m % 2:
            x_end, y_end = x_end + 4, Fraction(3 + r)
            pts.append((x_end, y_end))
        w = q - 1 - r  # lower combs return outside higher ones
        xr, top, xl = x_end + 1 + w, 5 + q + w, -3 - w
        pts += [(xr, y_end), (xr, top), (xl, top), (xl, height(r, 0))]
        paths.append(pts)
    return paths


def gen_counterexample(n: int, k: int, resolution: int = DEFAULT_RESOLUTION) -> list[ClosedCurve]:
    """n-k disjoint circles in a row plus k combs, each comb touching every circle once.

    With n-k even all combs run above the row and each pair crosses n-k times.
    With n-k odd the combs are split into a group above and a mirrored group
    below; pairs inside a group cross n-k+1 times and the groups never meet.
    """
    if not 2 <= k < n:
        raise InfeasibleParams(f"need 2 <= k < n, got n={n}, k={k}")
    _check_resolution(resolution)
    m = n - k
    qa, qb = (k, 0) if m % 2 == 0 else ((k + 1) // 2, k // 2)
    da, db = _touch_dirs(qa), _touch_dirs(qb) if qb else []
    extra = list(da) + [(x, -y) for x, y in db]
    family = [circle_polygon(f"O{g}", (4 * g, 0), 1, resolution, extra) for g in range(m)]
    for r, pts in enumerate(_comb_paths(qa, m, da)):
        family.append(ClosedCurve(f"A{r}", tuple(pts)))
    if qb:
        for r, pts in enumerate(_comb_paths(qb, m, db)):
            family.append(ClosedCurve(f"B{r}", tuple((x, -y) for x, y in reversed(pts))))
    return family


# ----------------------------------------------------------- tangent family

def _three_tangent(resolution):
    # radii 1, 2, 3 on a 3-4-5 triangle of centres
    return [
        circle_polygon("C0", (0, 0), 1, resolution, [(1, 0), (0, 1)]),
        circle_polygon("C1", (3, 0), 2, resolution, [(-1, 0), (Fraction(-3, 5), Fraction(4, 5))]),
        circle_polygon("C2", (0, 4), 3, resolution, [(0, -1), (Fraction(3, 5), Fraction(-4, 5))]),
    ]


def gen_tangent_family(
    n: int,
    resolution: int = DEFAULT_RESOLUTION,
    seed: int = 0,
    touching: int | None = None,
    all_touching: bool = False,
    retries: int = 20,
) -> list[ClosedCurve]:
    """Pairwise intersecting circles where a seeded set of disjoint pairs touch.

    Each touching pair is two circles of equal radius meeting at a point close
    to the origin; the remaining circles are centred on a smaller ring and cross
    everything. ``all_touching`` (n <= 3) makes every pair touch.
    """
    if n < 2:
        raise InfeasibleParams("need n >= 2")
    _check_resolution(resolution)
    if all_touching:
        if n == 2:
            touching = 1
        elif n == 3:
            return _three_tangent(resolution)
        else:
            raise InfeasibleParams("all pairs touching is only available for n <= 3")
    rng = random.Random(seed)
    if touching is None:
        touching = rng.randint(1, n // 2)
    if not 0 <= touching <= n // 2:
        raise InfeasibleParams(f"touching pairs must be in [0, {n // 2}]")
    for _ in range(retries):
        family = _tangent_attempt(n, touching, resolution, rng)
        report = validate_general_position(family, strict=True)
        if report.valid:
            kinds = [classify_pair(h)[0] for h in report.hits.values()]
            if kinds.count(TOUCHING) == touching:
                return family
    raise InfeasibleParams("could not place a valid tangent family; try another seed")


def _tangent_attempt(n, p, resolution, rng):
    R = Fraction(10)
    rho = float(R) * (1 - math.cos(math.pi / (2 * max(p, 1)))) / 4
    family = []
    for i in range(p):
        phi = math.pi * (i + rng.uniform(0.1, 0.4)) / p
        ux, uy = unit_vector(phi)
        px = Fraction(rng.uniform(-rho, rho)).limit_denominator(1000)
        py = Fraction(rng.uniform(-rho, rho)).limit_denominator(1000)
        family.append(circle_polygon(f"T{i}a", (px - R * ux, py - R * uy), R, resolution, [(ux, uy)]))
        family.append(circle_polygon(f"T{i}b", (px + R * ux, py + R * uy), R, resolution, [(-ux, -uy)]))
    free = n - 2 * p
    for j in range(free):
        cx, cy = unit_vector(2 * math.pi * (j + rng.uniform(0.1, 0.4)) / free)
        family.append(circle_polygon(f"F{j}", (R / 2 * cx, R / 2 * cy), R, resolution))
    return family


# ------------------------------------------------------ random intersecting

def gen_random_intersecting(
    n: int, seed: int = 0, resolution: int = DEFAULT_RESOLUTION, retries: int = 20
) -> list[ClosedCurve]:
    """Roughly concentric ellipses with distinct tilts on an integer grid; all crossings."""
    if n < 2:
        raise InfeasibleParams("need n >= 2")
    _check_resolution(resolution)
    for attempt in range(retries):
        rng = random.Random(seed * 1009 + attempt)
        family = []
        for i in range(n):
            psi = math.pi * (i + rng.uniform(0.0, 0.3)) / n
            c, s = math.cos(psi), math.sin(psi)
            a, b = rng.randint(900, 1100), rng.randint(300, 500)
            cx, cy = rng.randint(-50, 50), rng.randint(-50, 50)
            off = rng.uniform(0, 2 * math.pi)
            verts = []
            for j in range(resolution):
                th = off + 2 * math.pi * j / resolution
                x, y = a * math.cos(th), b * math.sin(th)
                verts.append((round(cx + x * c - y * s), round(cy + x * s + y * c)))
            family.append(ClosedCurve(f"E{i}", tuple(verts)))
        report = validate_general_position(family, strict=True)
        if report.valid and all(
            h.local_type != TANGENTIAL for hits in report.hits.values() for h in hits
        ):
            return family
    raise InfeasibleParams(f"no valid family after {retries} attempts (seed {seed})")


# ---------------------------------------------------------------- inflation

@dataclass(frozen=True)
class OpenArc:
    id: str
    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple(point(*v) for v in self.vertices)
        if len(verts) < 2:
            raise GeometryError(f"arc {self.id!r}: need at least 2 vertices")
        object.__setattr__(self, "vertices", verts)


def open_pair_hits(a: OpenArc, b: OpenArc):
    """Common points of two open polylines: list of (point, a_param, b_param)."""
    found = {}
    va, vb = a.vertices, b.vertices
    for i in range(len(va) - 1):
        for j in range(len(vb) - 1):
            for t, u in _segment_hits(va[i], va[i + 1], vb[j], vb[j + 1], f"{a.id}/{b.id}"):
                p = (va[i][0] + t * (va[i + 1][0] - va[i][0]), va[i][1] + t * (va[i + 1][1] - va[i][1]))
                if p in found:
                    continue
                pa = (i + 1, Fraction(0)) if t == 1 else (i, t)
                pb = (j + 1, Fraction(0)) if u == 1 else (j, u)
                for verts, (e, s) in ((va, pa), (vb, pb)):
                    if (e == 0 and s == 0) or e == len(verts) - 1:
                        raise GeometryError(f"arcs {a.id}/{b.id} meet at an endpoint")
                found[p] = (pa, pb)
    return [(Point(*p), pa, pb) for p, (pa, pb) in found.items()]


def _offset_side(arc: OpenArc, arcs: Sequence[OpenArc]) -> int:
    """+1 to inflate to the left of the arc, -1 to the right; away from every toucher."""
    sides = set()
    for other in arcs:
        if other.id == arc.id:
            continue
        hits = open_pair_hits(arc, other)
        if len(hits) != 1:
            continue
        _, pa, pb = hits[0]
        a_dirs = branch_directions(arc.vertices, *pa)
        b_dirs = branch_directions(other.vertices, *pb)
        if local_type(a_dirs, b_dirs) != TANGENTIAL:
            continue
        left = in_open_sector(b_dirs[0], a_dirs[1], a_dirs[0])
        sides.add(-1 if left else 1)
    if len(sides) > 1:
        raise GeometryError(f"arc {arc.id!r} is touched from both sides")
    return sides.pop() if sides else 1


def _normal(dx, dy):
    s = abs(dx) + abs(dy)
    return -dy / s, dx / s


def inflate_arcs(arcs: Sequence[OpenArc], epsilon) -> list[ClosedCurve]:
    """Turn each open arc into a thin closed loop that keeps its touchings.

    The loop follows the arc itself and returns along a copy shifted by about
    epsilon to the side away from the arcs touching it, so each touching point
    stays on both loops.
    """
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    loops = []
    for arc in arcs:
        side = _offset_side(arc, arcs)
        v = arc.vertices
        L = len(v)
        normals = [_normal(v[i + 1][0] - v[i][0], v[i + 1][1] - v[i][1]) for i in range(L - 1)]
        shifted = []
        for i in range(L):
            nx = sum(normals[e][0] for e in (i - 1, i) if 0 <= e < L - 1)
            ny = sum(normals[e][1] for e in (i - 1, i) if 0 <= e < L - 1)
            s = abs(nx) + abs(ny)
            shifted.append((v[i][0] + side * eps * nx / s, v[i][1] + side * eps * ny / s))
        loops.append(ClosedCurve(arc.id, tuple(v) + tuple(reversed(shifted))))
    _check_inflation(arcs, loops)
    return loops


def _check_inflation(arcs, loops):
    report = validate_general_position(loops, strict=False)
    if not report.valid:
        kinds = sorted({x.kind for x in report.violations})
        raise EpsilonTooLarge(f"inflated loops are not in general position: {', '.join(kinds)}")
    index = {arc.id: i for i, arc in enumerate(arcs)}
    for (i, j), hits in report.hits.items():
        before = open_pair_hits(arcs[index[loops[i].id]], arcs[index[loops[j].id]])
        was_touch = len(before) == 1 and local_type(
            branch_directions(arcs[i].vertices, *before[0][1]),
            branch_directions(arcs[j].vertices, *before[0][2]),
        ) == TANGENTIAL
        now_touch = len(hits) == 1 and hits[0].local_type == TANGENTIAL
        # disjoint pairs stay disjoint; crossing pairs keep between 1 and 4x their points
        limit_ok = len(hits) == 0 if not before else 0 < len(hits) <= 4 * len(before)
        if was_touch != now_touch or (not was_touch and not limit_ok):
            raise EpsilonTooLarge(f"inflation changed the intersection pattern of {loops[i].id}/{loops[j].id}")


def gen_random_arcs(n: int, seed: int = 0) -> list[OpenArc]:
    """Long segments through a common region with distinct slopes; pairwise crossing once."""
    rng = random.Random(seed)
    arcs = []
    for i in range(n):
        ux, uy = unit_vector(math.pi * (i + rng.uniform(0.1, 0.4)) / n)
        cx, cy = rng.randint(-5, 5), rng.randint(-5, 5)
        arcs.append(OpenArc(f"S{i}", ((cx - 100 * ux, cy - 100 * uy), (cx + 100 * ux, cy + 100 * uy))))
    return arcs


# ------------------------------------------------------------------- specs

KINDS = ("counterexample", "tangent_chain", "random_intersecting", "inflate")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int
    k: int | None = None
    seed: int = 0
    resolution: int = DEFAULT_RESOLUTION
    epsilon: Fraction = Fraction(1, 100)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InfeasibleParams(f"unknown generator kind {self.kind!r}")
        _check_resolution(self.resolution)
        if self.kind == "counterexample" and self.k is None:
            raise InfeasibleParams("counterexample needs k")

    def build(self) -> list[ClosedCurve]:
        if self.kind == "counterexample":
            return gen_counterexample(self.n, self.k, self.resolution)
        if self.kind == "tangent_chain":
            return gen_tangent_family(self.n, self.resolution, self.seed, touching=self.k)
        if self.kind == "random_intersecting":
            return gen_random_intersecting(self.n, self.seed, self.resolution)
        return inflate_arcs(gen_random_arcs(self.n, self.seed), self.epsilon)


__all__ = [
    "CROSSING",
    "TOUCHING",
    "EpsilonTooLarge",
    "GeneratorSpec",
    "InfeasibleParams",
    "OpenArc",
    "circle_polygon",
    "gen_counterexample",
    "gen_random_arcs",
    "gen_random_intersecting",
    "gen_tangent_family",
    "inflate_arcs",
    "open_pair_hits",
    "unit_vector",
]
