"""Static SVG figures of an arrangement with optional lens and charge layers."""
from __future__ import annotations

import warnings
from typing import Iterable, Sequence

from .arrangement import Arrangement, enumerate_lenses, locate
from .charging import ChargeLedger
from .geometry import CROSSING, TOUCHING, ClosedCurve

LAYERS = ("touchings", "crossings", "lenses", "charges")
DEFAULT_LAYERS = ("touchings", "crossings")

WIDTH = 800
MARGIN = 20


class _Frame:
    def __init__(self, family: Sequence[ClosedCurve]):
        xs = [float(v.x) for c in family for v in c.vertices]
        ys = [float(v.y) for c in family for v in c.vertices]
        self.x0, self.y1 = min(xs), max(ys)
        span = max(max(xs) - self.x0, self.y1 - min(ys), 1e-9)
        self.s = (WIDTH - 2 * MARGIN) / span
        self.height = round((self.y1 - min(ys)) * self.s + 2 * MARGIN)

    def xy(self, p) -> str:
        return f"{(float(p[0]) - self.x0) * self.s + MARGIN:.3f},{(self.y1 - float(p[1])) * self.s + MARGIN:.3f}"


def _forward(curve: ClosedCurve, p, q) -> list:
    (ei, ti), (ej, tj) = locate(curve, p), locate(curve, q)
    verts, n = curve.vertices, len(curve.vertices)
    out = [p]
    if not (ej == ei and tj > ti):
        k = ei + 1
        while True:
            idx = k % n
            if idx == ej and tj == 0:
                break
            out.append(verts[idx])
            if idx == ej:
                break
            k += 1
    out.append(q)
    return out


def _subpath(curve: ClosedCurve, direction: int, p, q) -> list:
    """Vertices of curve from point p to point q following ``direction``."""
    if direction > 0:
        return _forward(curve, p, q)
    return _forward(curve, q, p)[::-1]


def render_svg(
    family: Sequence[ClosedCurve],
    arr: Arrangement | None = None,
    layers: Iterable[str] = DEFAULT_LAYERS,
    ledger: ChargeLedger | None = None,
) -> str:
    layers = [x for x in layers]
    for name in layers:
        if name not in LAYERS:
            raise ValueError(f"unknown layer {name!r}; choose from {', '.join(LAYERS)}")
    frame = _Frame(family)
    geo = {c.id: c for c in family}
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{frame.height}" '
        f'viewBox="0 0 {WIDTH} {frame.height}">',
        '<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" '
        'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#2a8"/></marker></defs>',
        '<g id="curves" fill="none" stroke="#333" stroke-width="1">',
    ]
    for c in family:
        pts = " L".join(frame.xy(v) for v in c.vertices)
        out.append(f'<path id="curve-{c.id}" d="M{pts} Z"/>')
    out.append("</g>")

    if arr is None and any(x in layers for x in LAYERS):
        warnings.warn("no arrangement supplied; analysis layers skipped")
        layers = []

    if "lenses" in layers:
        out.append('<g id="lenses" fill="none" stroke="#e90" stroke-width="4" stroke-opacity="0.35">')
        for lens in enumerate_lenses(arr):
            rec = arr.curve(lens.arc.curve)
            c = geo[rec.id]
            pts = _subpath(
                c, rec.orientation * c.orientation, arr.points[lens.arc.start].point, arr.points[lens.arc.end].point
            )
            out.append(f'<path id="lens-{lens.id}" d="M{" L".join(frame.xy(p) for p in pts)}"/>')
        out.append("</g>")

    if "charges" in layers:
        if ledger is None:
            warnings.warn("charge layer requested without a ledger; skipped")
        else:
            out.append('<g id="charges" stroke="#2a8" stroke-width="1" marker-end="url(#arrow)">')
            pairs = sorted({(r.accounted_source, r.target) for r in ledger.records if r.accounted_source != r.target})
            for s, t in pairs:
                a, b = frame.xy(arr.points[s].point).split(","), frame.xy(arr.points[t].point).split(",")
                out.append(f'<line id="charge-{s}-{t}" x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}"/>')
            out.append("</g>")

    for name, kind, colour, prefix in (("crossings", CROSSING, "blue", "x"), ("touchings", TOUCHING, "red", "t")):
        if name not in layers:
            continue
        out.append(f'<g id="{name}" fill="{colour}">')
        for pid in sorted(arr.points):
            p = arr.points[pid]
            if p.kind == kind:
                cx, cy = frame.xy(p.point).split(",")
                out.append(f'<circle id="{prefix}{pid}" class="{kind}" cx="{cx}" cy="{cy}" r="3"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
