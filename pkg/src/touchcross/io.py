"""File formats: curve families, combinatorial arrangements, ledgers and reports.

Family vertices are written as ``[[num, den], [num, den]]`` string pairs. Reports
write rationals as decimal strings when the expansion terminates and as
"num/den" otherwise. Nothing passes through a binary float.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .arrangement import Arrangement, CurveRecord, IntersectionPoint
from .charging import ChargeLedger
from .geometry import ClosedCurve, GeometryError, Point


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


# ---------------------------------------------------------------- rationals

def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    places = max(twos, fives)
    digits = str(abs(q.numerator) * 10**places // q.denominator).rjust(places + 1, "0")
    sign = "-" if q < 0 else ""
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def parse_rational(value: Any, field: str = "value") -> Fraction:
    try:
        if isinstance(value, bool):
            raise TypeError
        if isinstance(value, (int, str)):
            return Fraction(value.strip() if isinstance(value, str) else value)
        if isinstance(value, (list, tuple)) and len(value) == 2:
            num, den = (_integer(v) for v in value)
            return Fraction(num, den)
    except (ValueError, TypeError, ZeroDivisionError):
        pass
    raise ParseError(f"not a rational: {value!r}", field=field)


def _integer(v) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise TypeError
    return int(v)


def rational_pair(q) -> list[str]:
    q = Fraction(q)
    return [str(q.numerator), str(q.denominator)]


def _loads(text: str):
    try:
        # keep JSON numbers exact: floats arrive as their decimal text
        return json.loads(text, parse_float=str)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None


def _read(source) -> str:
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        try:
            return Path(source).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc.strerror}") from None
    return source


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


# ----------------------------------------------------------- curve families

def family_to_dict(family: Sequence[ClosedCurve]) -> dict:
    curves = []
    for c in family:
        entry = {"id": c.id, "vertices": [[rational_pair(v.x), rational_pair(v.y)] for v in c.vertices]}
        if c.orientation != 1:
            entry["orientation"] = c.orientation
        curves.append(entry)
    return {"curves": curves}


def dump_family(family: Sequence[ClosedCurve]) -> str:
    return json.dumps(family_to_dict(family), indent=2) + "\n"


def load_family(source) -> list[ClosedCurve]:
    """Read a family from a path or a JSON string."""
    data = _loads(_read(source))
    curves = _field(data, "curves", "curves", list)
    family = []
    for i, entry in enumerate(curves):
        where = f"curves[{i}]"
        if not isinstance(entry, dict):
            raise ParseError("curve entry must be an object", field=where)
        cid = str(_field(entry, "id", f"{where}.id", (str, int)))
        raw = _field(entry, "vertices", f"{where}.vertices", list)
        verts = []
        for j, v in enumerate(raw):
            vf = f"{where}.vertices[{j}]"
            if not isinstance(v, list) or len(v) != 2:
                raise ParseError("vertex must be a pair [x, y]", field=vf)
            verts.append((parse_rational(v[0], vf + ".x"), parse_rational(v[1], vf + ".y")))
        orientation = entry.get("orientation", 1)
        try:
            family.append(ClosedCurve(cid, tuple(verts), orientation))
        except GeometryError as exc:
            raise ParseError(str(exc), field=where) from None
    return family


def _field(obj, key, where, types):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError("missing field", field=where)
    val = obj[key]
    if not isinstance(val, types):
        raise ParseError("wrong type", field=where)
    return val


# -------------------------------------------------------------- combinatorial

def arrangement_to_dict(arr: Arrangement) -> dict:
    points = []
    for pid in sorted(arr.points):
        p = arr.points[pid]
        entry = {"id": p.id, "curves": list(p.curves), "kind": p.kind}
        if p.point is not None:
            entry["point"] = [format_rational(p.point.x), format_rational(p.point.y)]
        points.append(entry)
    return {
        "curves": [{"id": c.id, "sequence": list(c.sequence), "orientation": c.orientation} for c in arr.curves],
        "points": points,
        "sad": None if arr.sad is None else sorted(arr.sad),
    }


def dump_arrangement(arr: Arrangement) -> str:
    return json.dumps(arrangement_to_dict(arr), indent=2) + "\n"


def load_arrangement(source) -> Arrangement:
    data = _loads(_read(source))
    try:
        records = tuple(
            CurveRecord(str(c["id"]), tuple(int(p) for p in c["sequence"]), int(c.get("orientation", 1)))
            for c in data["curves"]
        )
        points = {}
        for p in data["points"]:
            pt = p.get("point")
            if pt is not None:
                pt = Point(parse_rational(pt[0], "point.x"), parse_rational(pt[1], "point.y"))
            points[int(p["id"])] = IntersectionPoint(int(p["id"]), tuple(p["curves"]), p["kind"], pt)
        sad = data.get("sad")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed arrangement: {exc}") from None
    return Arrangement(records, points, None if sad is None else frozenset(sad))


# -------------------------------------------------------------------- ledgers

LEDGER_COLUMNS = ("phase", "rule", "source", "accounted_source", "target", "amount_num", "amount_den")


def ledger_csv(ledger: ChargeLedger) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LEDGER_COLUMNS)
    for r in ledger.records:
        w.writerow((r.phase, r.rule, r.source, r.accounted_source, r.target, r.amount.numerator, r.amount.denominator))
    return buf.getvalue()


def read_ledger_csv(text: str) -> list[tuple]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [
        (int(r["phase"]), int(r["rule"]), r["source"], int(r["accounted_source"]), int(r["target"]),
         Fraction(int(r["amount_num"]), int(r["amount_den"])))
        for r in rows
    ]


def ledger_summary(ledger: ChargeLedger) -> dict:
    return {
        "records": len(ledger),
        "by_rule": ledger.by_rule(),
        "by_phase": ledger.by_phase(),
        "by_source": ledger.by_source(),
        "by_target": ledger.by_target(),
    }


# -------------------------------------------------------------------- reports

def to_jsonable(obj):
    """Recursively convert reports into JSON-ready values with exact rationals."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, float):
        return format_rational(Fraction(obj))
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if not f.name.startswith("_")}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return [to_jsonable(v) for v in sorted(obj)]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def happiness_to_dict(report) -> dict:
    return {
        "alpha1": format_rational(report.alpha1),
        "counts": report.counts,
        "happy": sorted(report.happy),
        "sad": sorted(report.sad),
        "witnesses": {
            str(pid): [[a.curve, a.start, a.end] for a in arcs] for pid, arcs in sorted(report.witnesses.items())
        },
    }


def schedule_report(result) -> dict:
    return {
        "phases": [
            {
                "index": ph.index,
                "k": ph.params.k,
                "alpha": ph.params.alpha,
                "v": ph.params.v,
                "w": ph.params.w,
                "records": len(ph.records),
                "poor": sorted(ph.poor),
                "poor_arcs": ph.poor_arcs,
                "same_curve_apex": ph.same_curve_apex,
                "no_apex": ph.no_apex,
            }
            for ph in result.phases
        ],
        "audits": [
            {"name": a.name, "asserted": a.asserted, "holds": a.holds, "detail": a.detail} for a in result.audits
        ],
        "ledger": ledger_summary(result.ledger),
        "ok": result.ok,
    }
