"""Multi-phase charging scheme from intersection points to sad touchings.

All amounts are exact ``Fraction`` values. Lengths of arcs count sad touchings
on the closed arc, both endpoints included.
"""
from __future__ import annotations

import bisect
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .arrangement import Arrangement, Lens, SadUndefined, enumerate_lenses
from .happiness import HappinessReport, audit_happy_bound, classify_happy, default_alpha1


class EmptySchedule(ValueError):
    pass


# ---------------------------------------------------------------- parameters

@dataclass(frozen=True)
class PhaseParams:
    k: Fraction
    alpha1: Fraction
    n: int

    def __post_init__(self):
        object.__setattr__(self, "k", Fraction(self.k))
        object.__setattr__(self, "alpha1", Fraction(self.alpha1))
        if self.k <= 0 or self.alpha1 <= 0 or self.n < 1:
            raise ValueError("scale, alpha1 and n must be positive")

    @property
    def alpha(self) -> Fraction:
        return self.alpha1 + 2

    @property
    def v(self) -> Fraction:
        return 21000 * self.alpha**8

    @property
    def w(self) -> Fraction:
        return self.k**3 / (2000 * self.alpha**5 * self.n**2)

    @property
    def lens_cap(self) -> Fraction:
        """Largest lens length charged by the lens rule."""
        return 3 * self.alpha**3 * self.k


@dataclass(frozen=True)
class PhaseSchedule:
    phases: tuple[PhaseParams, ...]

    @property
    def M(self) -> int:
        return len(self.phases)


def scale_exponents(n: int) -> list[int]:
    """Integers u with loglog(n)/5 < u <= loglog(n)/2, binary logs, decided exactly."""
    if n < 2:
        return []
    bits = n.bit_length()
    out = []
    u = 1
    # u <= loglog n / 2  <=>  2^(2^(2u)) <= n
    while (1 << (2 * u)) <= bits - 1:
        # loglog n / 5 < u  <=>  n < 2^(2^(5u))
        if bits <= (1 << (5 * u)):
            out.append(u)
        u += 1
    return out


def default_schedule(n: int, alpha1=None) -> PhaseSchedule:
    us = scale_exponents(n)
    if not us:
        raise EmptySchedule(
            f"no integer u with loglog(n)/5 < u <= loglog(n)/2 for n={n} "
            "(needs n >= 16); pass explicit scales"
        )
    alpha1 = default_alpha1(n) if alpha1 is None else Fraction(alpha1)
    alpha = alpha1 + 2
    return PhaseSchedule(
        tuple(PhaseParams(Fraction(80) * alpha**2 * n / (1 << (3**u)), alpha1, n) for u in us)
    )


def schedule_from_scales(n: int, alpha1, scales: Iterable) -> PhaseSchedule:
    phases = tuple(PhaseParams(Fraction(k), Fraction(alpha1), n) for k in scales)
    if not phases:
        raise EmptySchedule("scale list is empty")
    return PhaseSchedule(phases)


# -------------------------------------------------------------------- ledger

@dataclass(frozen=True, order=True)
class ChargeRecord:
    phase: int
    rule: int
    accounted_source: int
    source: str
    target: int
    amount: Fraction = field(compare=False)


def point_source(pid: int) -> str:
    return f"p{pid}"


class ChargeLedger:
    def __init__(self, records: Iterable[ChargeRecord] = ()):
        self.records = sorted(records)

    def __len__(self):
        return len(self.records)

    def __eq__(self, other):
        return isinstance(other, ChargeLedger) and [
            (r, r.amount) for r in self.records
        ] == [(r, r.amount) for r in other.records]

    def _sum(self, key, pred=None) -> dict:
        out: dict = defaultdict(Fraction)
        for r in self.records:
            if pred is None or pred(r):
                out[key(r)] += r.amount
        return dict(out)

    def by_source(self, phase=None, rules=None) -> dict[int, Fraction]:
        return self._sum(lambda r: r.accounted_source, self._filter(phase, rules))

    def by_target(self, phase=None, rules=None) -> dict[int, Fraction]:
        return self._sum(lambda r: r.target, self._filter(phase, rules))

    def by_rule(self) -> dict[int, Fraction]:
        return self._sum(lambda r: r.rule)

    def by_phase(self) -> dict[int, Fraction]:
        return self._sum(lambda r: r.phase)

    def by_lens(self) -> dict[str, Fraction]:
        return self._sum(lambda r: r.source, lambda r: r.rule == 2)

    @staticmethod
    def _filter(phase, rules):
        if phase is None and rules is None:
            return None
        return lambda r: (phase is None or r.phase == phase) and (rules is None or r.rule in rules)


# ------------------------------------------------------------------- helpers

def _require_sad(arr: Arrangement) -> frozenset[int]:
    if arr.sad is None:
        raise SadUndefined("sad set not computed; run classify_happy first")
    return arr.sad


def _walk_sad(seq, start: int, step: int, sad, limit) -> list[int]:
    """Sad points met walking from seq[start] while the closed-arc sad count stays <= limit."""
    out = []
    cnt = 0
    L = len(seq)
    for s in range(L):
        p = seq[(start + step * s) % L]
        if p in sad:
            cnt += 1
            if cnt > limit:
                break
            out.append(p)
    return out


class ApexIndex:
    """Answers 'first point of b after position i on b2' by bisection."""

    def __init__(self, arr: Arrangement):
        self.arr = arr
        self._cache: dict[tuple[str, str], list[int]] = {}

    def _positions(self, b2: str, b: str) -> list[int]:
        key = (b2, b)
        if key not in self._cache:
            self._cache[key] = [
                i for i, p in enumerate(self.arr.sequence(b2)) if self.arr.on_curve(b, p)
            ]
        return self._cache[key]

    def first_after(self, b2: str, i: int, b: str) -> int | None:
        pos = self._positions(b2, b)
        if not pos:
            return None
        j = bisect.bisect_right(pos, i)
        return self.arr.sequence(b2)[pos[j % len(pos)]]


# --------------------------------------------------------------------- rules

def run_rule1(arr: Arrangement, params: PhaseParams, phase: int = 0) -> list[ChargeRecord]:
    """Each point pays 1/k to sad touchings within arc length k on a shared curve."""
    sad = _require_sad(arr)
    amount = 1 / params.k
    targets: dict[int, set[int]] = defaultdict(set)
    for rec in arr.curves:
        seq = rec.sequence
        if not any(p in sad for p in seq):
            continue
        for i, x in enumerate(seq):
            targets[x].update(_walk_sad(seq, i, 1, sad, params.k))
            targets[x].update(_walk_sad(seq, i, -1, sad, params.k))
    return sorted(
        ChargeRecord(phase, 1, x, point_source(x), t, amount) for x, ts in targets.items() for t in ts
    )


def lens_length(arr: Arrangement, lens: Lens) -> int:
    sad = _require_sad(arr)
    return sum(1 for p in arr.arc_points(lens.arc) if p in sad)


def rule2_amount(params: PhaseParams, length: int) -> Fraction:
    return params.v / (params.k * (length + params.w))


def run_rule2(
    arr: Arrangement, params: PhaseParams, lenses: Sequence[Lens], phase: int = 0
) -> list[ChargeRecord]:
    """Short lenses pay sad touchings reachable from their sad points along another curve."""
    sad = _require_sad(arr)
    out = []
    for lens in lenses:
        pts = arr.arc_points(lens.arc)
        on_lens = [p for p in pts if p in sad]
        length = len(on_lens)
        if not on_lens or length > params.lens_cap:
            continue
        amount = rule2_amount(params, length)
        targets: set[int] = set()
        for s in on_lens:
            c = arr.points[s].other(lens.arc.curve)
            seq = arr.sequence(c)
            # arcs of c from t to s, i.e. walk backwards from s
            targets.update(_walk_sad(seq, arr.position(c, s), -1, sad, params.k + 1))
        start = lens.arc.start
        out.extend(ChargeRecord(phase, 2, start, lens.id, t, amount) for t in targets)
    return sorted(out)


def compute_poor(arr: Arrangement, records: Iterable[ChargeRecord], params: PhaseParams) -> frozenset[int]:
    """Sad touchings receiving less than alpha from the first two rules."""
    sad = _require_sad(arr)
    got: dict[int, Fraction] = defaultdict(Fraction)
    for r in records:
        if r.rule in (1, 2):
            got[r.target] += r.amount
    return frozenset(t for t in sad if got[t] < params.alpha)


@dataclass(frozen=True)
class PoorArc:
    curve: str
    start: int
    end: int
    apex: int


@dataclass
class Rule3Result:
    records: list[ChargeRecord]
    poor_arcs: list[PoorArc]
    same_curve_apex: int = 0
    no_apex: int = 0


def enumerate_poor_arcs(arr: Arrangement, params: PhaseParams, poor: Iterable[int]):
    """Poor arcs with their apexes; also counts arcs whose apex is undefined."""
    sad = _require_sad(arr)
    index = ApexIndex(arr)
    arcs, same, none = [], 0, 0
    for t in sorted(poor):
        for a in arr.points[t].curves:
            seq = arr.sequence(a)
            i = arr.position(a, t)
            b = arr.points[t].other(a)
            for q in _walk_sad(seq, i, 1, sad, params.k + 1)[1:]:
                b2 = arr.points[q].other(a)
                if b2 == b:
                    same += 1
                    continue
                x = index.first_after(b2, arr.position(b2, q), b)
                if x is None:
                    none += 1
                    continue
                arcs.append(PoorArc(a, t, q, x))
    return arcs, same, none


def run_rule3(
    arr: Arrangement, params: PhaseParams, poor: Iterable[int], phase: int = 0
) -> Rule3Result:
    """Apexes pay poor touchings unless too many poor arcs crowd the arc from apex to start."""
    arcs, same, none = enumerate_poor_arcs(arr, params, poor)
    # per (apex, curve through apex): sorted forward offsets of poor-arc starts on that curve
    offsets: dict[tuple[int, str], list[int]] = defaultdict(list)
    for pa in arcs:
        for b in arr.points[pa.apex].curves:
            if arr.on_curve(b, pa.start):
                L = len(arr.sequence(b))
                off = (arr.position(b, pa.start) - arr.position(b, pa.apex)) % L
                offsets[(pa.apex, b)].append(off)
    for v in offsets.values():
        v.sort()
    amount = 2 * params.alpha / params.k
    charged = set()
    for pa in arcs:
        if (pa.apex, pa.start) in charged:
            continue
        b = arr.points[pa.start].other(pa.curve)
        L = len(arr.sequence(b))
        off_t = (arr.position(b, pa.start) - arr.position(b, pa.apex)) % L
        crowd = bisect.bisect_right(offsets[(pa.apex, b)], off_t)
        if crowd * params.alpha <= params.k:
            charged.add((pa.apex, pa.start))
    records = sorted(
        ChargeRecord(phase, 3, x, point_source(x), t, amount) for x, t in charged
    )
    return Rule3Result(records, arcs, same, none)


# --------------------------------------------------------------------- phases

@dataclass
class PhaseResult:
    index: int
    params: PhaseParams
    records: list[ChargeRecord]
    poor: frozenset[int]
    poor_arcs: int
    same_curve_apex: int
    no_apex: int

    @property
    def ledger(self) -> ChargeLedger:
        return ChargeLedger(self.records)

    def sent(self, rules=None) -> dict[int, Fraction]:
        return self.ledger.by_source(rules=rules)

    def received(self, rules=None) -> dict[int, Fraction]:
        return self.ledger.by_target(rules=rules)


def run_phase(arr: Arrangement, params: PhaseParams, phase: int = 0, lenses=None) -> PhaseResult:
    lenses = enumerate_lenses(arr) if lenses is None else lenses
    r12 = run_rule1(arr, params, phase) + run_rule2(arr, params, lenses, phase)
    poor = compute_poor(arr, r12, params)
    r3 = run_rule3(arr, params, poor, phase)
    return PhaseResult(
        phase, params, sorted(r12 + r3.records), poor, len(r3.poor_arcs), r3.same_curve_apex, r3.no_apex
    )


# --------------------------------------------------------------------- audits

@dataclass
class Audit:
    name: str
    asserted: bool
    holds: bool
    detail: dict = field(default_factory=dict)


def audit_out_charge(phases: Sequence[PhaseResult]) -> Audit:
    """Per phase and source: rule 1 <= 4, rule 3 <= 4, together <= 8."""
    worst = {1: Fraction(0), 3: Fraction(0), "13": Fraction(0)}
    violations = []
    for ph in phases:
        s1, s3 = ph.sent(rules={1}), ph.sent(rules={3})
        for x in sorted(set(s1) | set(s3)):
            a, b = s1.get(x, Fraction(0)), s3.get(x, Fraction(0))
            worst[1], worst[3], worst["13"] = max(worst[1], a), max(worst[3], b), max(worst["13"], a + b)
            if a > 4 or b > 4 or a + b > 8:
                violations.append({"phase": ph.index, "source": x, "rule1": a, "rule3": b})
    return Audit(
        "A1 out-charge (rules 1+3) <= 8",
        True,
        not violations,
        {"max_rule1": worst[1], "max_rule3": worst[3], "max_rule13": worst["13"], "violations": violations},
    )


def audit_lenses(arr: Arrangement, phases: Sequence[PhaseResult], lenses: Sequence[Lens]) -> Audit:
    """Rule-2 amounts match the formula and the length cap; cross-phase totals vs 3v reported."""
    by_id = {lens.id: lens for lens in lenses}
    bad = []
    for ph in phases:
        for r in ph.records:
            if r.rule != 2:
                continue
            length = lens_length(arr, by_id[r.source])
            if length > ph.params.lens_cap or r.amount != rule2_amount(ph.params, length):
                bad.append({"phase": ph.index, "lens": r.source, "length": length, "amount": r.amount})
    totals = ChargeLedger(r for ph in phases for r in ph.records).by_lens()
    v = phases[0].params.v if phases else Fraction(0)
    M = len(phases)
    return Audit(
        "A2 lens charges",
        True,
        not bad,
        {
            "violations": bad,
            "lens_totals": totals,
            "max_lens_total": max(totals.values(), default=Fraction(0)),
            "three_v": 3 * v,
            "lenses_over_3v": sorted(k for k, t in totals.items() if t > 3 * v),
            "M": M,
            "M_at_least_3v": M >= 3 * v,
        },
    )


def audit_in_charge(arr: Arrangement, phases: Sequence[PhaseResult]) -> Audit:
    """Reported only: how many sad touchings got at least alpha in each phase."""
    rows = []
    for ph in phases:
        got = ph.received()
        vals = [got.get(t, Fraction(0)) for t in sorted(arr.sad or ())]
        rows.append(
            {
                "phase": ph.index,
                "k": ph.params.k,
                "alpha": ph.params.alpha,
                "sad": len(vals),
                "below_alpha": sum(1 for x in vals if x < ph.params.alpha),
                "min_received": min(vals, default=None),
                "poor": len(ph.poor),
            }
        )
    return Audit("A3 in-charge vs alpha (reported)", False, True, {"phases": rows})


def audit_ratio(arr: Arrangement, phases: Sequence[PhaseResult], alpha1: Fraction) -> Audit:
    """If every sad touching got alpha*M and every source sent <= 10M, check the final ratios."""
    M = len(phases)
    alpha = alpha1 + 2
    ledger = ChargeLedger(r for ph in phases for r in ph.records)
    got, sent = ledger.by_target(), ledger.by_source()
    sad = arr.sad or frozenset()
    premise_in = all(got.get(t, 0) >= alpha * M for t in sad)
    premise_out = all(s <= 10 * M for s in sent.values())
    n_xp, n_tp = len(arr.points), len(sad)
    ratio_ok = n_tp == 0 or Fraction(n_xp, n_tp) >= alpha / 10
    total_ok = len(arr.T) <= 16 * n_xp / alpha1
    applies = premise_in and premise_out
    return Audit(
        "A4 ratio arithmetic",
        True,
        (not applies) or (ratio_ok and total_ok),
        {
            "premise_in": premise_in,
            "premise_out": premise_out,
            "applies": applies,
            "X_prime": n_xp,
            "T_prime": n_tp,
            "ratio_ok": ratio_ok,
            "T_le_16Xp_over_alpha1": total_ok,
        },
    )


def audit_conservation(phases: Sequence[PhaseResult]) -> Audit:
    bad = []
    for ph in phases:
        out = sum(ph.sent().values(), Fraction(0))
        inn = sum(ph.received().values(), Fraction(0))
        if out != inn or any(r.amount <= 0 for r in ph.records):
            bad.append(ph.index)
    return Audit("conservation", True, not bad, {"violations": bad})


def audit_small_curves(arr: Arrangement, phases: Sequence[PhaseResult]) -> Audit:
    """Curves with at most k sad points should carry no poor point.

    The underlying argument needs the curve to hold at least alpha*k points of
    X' (every one of them pays 1/k); curves below that are reported separately.
    """
    sad = arr.sad or frozenset()
    checked = 0
    inside, outside, outside_curves = [], [], 0
    for ph in phases:
        for rec in arr.curves:
            on = [p for p in rec.sequence if p in sad]
            if len(on) > ph.params.k:
                continue
            covered = len(rec.sequence) >= ph.params.alpha * ph.params.k
            bad = [p for p in on if p in ph.poor]
            if covered:
                checked += 1
                inside.extend({"phase": ph.index, "curve": rec.id, "point": p} for p in bad)
            else:
                outside_curves += 1
                outside.extend({"phase": ph.index, "curve": rec.id, "point": p} for p in bad)
    return Audit(
        "small-curves: at most k sad points, none poor",
        True,
        not inside,
        {
            "curves_checked": checked,
            "violations": inside,
            "curves_below_alpha_k": outside_curves,
            "poor_on_curves_below_alpha_k": outside,
        },
    )


@dataclass
class ScheduleResult:
    schedule: PhaseSchedule
    phases: list[PhaseResult]
    audits: list[Audit]

    @property
    def ledger(self) -> ChargeLedger:
        return ChargeLedger(r for ph in self.phases for r in ph.records)

    @property
    def ok(self) -> bool:
        return all(a.holds for a in self.audits if a.asserted)

    def audit(self, prefix: str) -> Audit:
        return next(a for a in self.audits if a.name.startswith(prefix))


def run_schedule(arr: Arrangement, schedule: PhaseSchedule) -> ScheduleResult:
    if not schedule.phases:
        raise EmptySchedule("schedule has no phases")
    _require_sad(arr)
    lenses = enumerate_lenses(arr)
    phases = [run_phase(arr, p, i, lenses) for i, p in enumerate(schedule.phases)]
    alpha1 = schedule.phases[0].alpha1
    audits = [
        audit_out_charge(phases),
        audit_lenses(arr, phases, lenses),
        audit_in_charge(arr, phases),
        audit_ratio(arr, phases, alpha1),
        audit_conservation(phases),
        audit_small_curves(arr, phases),
    ]
    return ScheduleResult(schedule, phases, audits)


# ------------------------------------------------------------------ summaries

def pair_stats(arr: Arrangement) -> list[dict]:
    counts: dict[tuple[str, str], list[int]] = {}
    for p in arr.points.values():
        counts.setdefault(tuple(p.curves), []).append(p.id)
    out = []
    for a, b in combinations(arr.curve_ids, 2):
        pids = counts.get((a, b), []) or counts.get((b, a), [])
        kind = arr.points[pids[0]].kind if pids else "disjoint"
        out.append({"curves": [a, b], "points": len(pids), "kind": kind})
    return out


def analyze_family(arr: Arrangement, alpha1=None) -> dict:
    X, T = len(arr.X), len(arr.T)
    ref = default_alpha1(arr.n) if arr.n >= 3 else None
    a1 = Fraction(alpha1) if alpha1 is not None else ref
    summary = {
        "n": arr.n,
        "X": X,
        "T": T,
        "X_prime": X + T,
        "ratio": "inf" if T == 0 else Fraction(X, T),
        "reference_alpha1": ref,
        "alpha1": a1,
        "pairs": pair_stats(arr),
    }
    if a1 is not None:
        report = classify_happy(arr, a1)
        audit = audit_happy_bound(arr, report)
        summary.update(
            happy=len(report.happy),
            sad=len(report.sad),
            happy_bound={"lhs": audit.lhs, "rhs": audit.rhs, "holds": audit.holds},
        )
    return summary


def check_richter_thomassen(arr: Arrangement) -> dict:
    n, X, T = arr.n, len(arr.X), len(arr.T)
    pairs = pair_stats(arr)
    strict = all(p["points"] > 0 for p in pairs)
    trivial = X >= 2 * (comb(n, 2) - T)
    total = X + T
    touching_free = T == 0
    holds = trivial and (not touching_free or total >= n * n - n)
    return {
        "n": n,
        "X": X,
        "T": T,
        "total": total,
        "bound": n * n - n,
        "regime": "touching-free" if touching_free else "trivial-bound",
        "pairwise_intersecting": strict,
        "trivial_bound_holds": trivial,
        "total_at_least_n2_minus_n": total >= n * n - n,
        "holds": holds,
    }


def happiness_then_sad(arr: Arrangement, alpha1) -> tuple[Arrangement, HappinessReport]:
    report = classify_happy(arr, alpha1)
    return arr.with_sad(report.sad), report
