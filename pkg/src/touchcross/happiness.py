"""Red-Blue covering, happy/sad touchings and the happy-count audit."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arrangement import Arc, Arrangement
from .geometry import CROSSING


class HypothesisFailed(ValueError):
    pass


def default_alpha1(n: int) -> Fraction:
    """(log log n)^(1/8) / 10 with binary logs, as a rational (denominator <= 10**9)."""
    if n < 3:
        raise ValueError("default alpha1 needs n >= 3 (log log n must be positive)")
    val = math.log2(math.log2(n)) ** 0.125 / 10
    return Fraction(val).limit_denominator(10**9)


# ------------------------------------------------------------------ Red-Blue

@dataclass(frozen=True)
class RedBlueInstance:
    """Points 0..size-1 along a curve (closed if ``cyclic``).

    ``intervals[x]`` is (start, end): the arc from start to end in curve order,
    wrapping around on a closed curve. Each red x must be one of the two ends.
    """

    size: int
    red: frozenset[int]
    weights: dict[int, Fraction]
    lam: Fraction
    intervals: dict[int, tuple[int, int]]
    cyclic: bool = True

    def __post_init__(self):
        for x in self.red:
            s, e = self.intervals[x]
            if x not in (s, e):
                raise ValueError(f"red point {x} is not an end of its interval")
            if not self.cyclic and s > e:
                raise ValueError("linear intervals need start <= end")
        if any(w <= 0 for w in self.weights.values()):
            raise ValueError("blue weights must be positive")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")

    @property
    def blue(self) -> frozenset[int]:
        return frozenset(self.weights)

    def members(self, x: int) -> frozenset[int]:
        s, e = self.intervals[x]
        if self.cyclic:
            return frozenset((s + i) % self.size for i in range((e - s) % self.size + 1))
        return frozenset(range(s, e + 1))

    def blue_weight(self, pts) -> Fraction:
        return sum((self.weights[p] for p in pts if p in self.weights), Fraction(0))


@dataclass(frozen=True)
class RedBlueCheck:
    hypothesis_holds: bool
    conclusion_holds: bool
    blue_weight: Fraction
    bound: Fraction  # lambda |R| / 3


def redblue_verify(inst: RedBlueInstance) -> RedBlueCheck:
    hyp = all(
        inst.blue_weight(inst.members(x)) >= inst.lam * len(inst.red & inst.members(x))
        for x in inst.red
    )
    total = inst.blue_weight(inst.weights)
    bound = inst.lam * len(inst.red) / 3
    return RedBlueCheck(hyp, total >= bound, total, bound)


@dataclass(frozen=True)
class GreedyStep:
    point: int
    interval: tuple[int, int]
    red_in_current: int  # |R_j ∩ I_x| against the shrinking red set
    red_in_original: int  # |R ∩ I_x|
    blue_weight: Fraction


@dataclass
class GreedyCertificate:
    steps: list[GreedyStep]
    red_total: int
    lam: Fraction

    @property
    def selected(self) -> list[int]:
        return [s.point for s in self.steps]

    @property
    def red_covered(self) -> int:
        return sum(s.red_in_current for s in self.steps)

    @property
    def blue_covered(self) -> Fraction:
        return sum((s.blue_weight for s in self.steps), Fraction(0))

    def holds(self) -> bool:
        return (
            3 * self.red_covered >= self.red_total
            and 3 * self.blue_covered >= self.lam * self.red_total
        )


def redblue_greedy(inst: RedBlueInstance) -> GreedyCertificate:
    """Repeatedly take the red point whose interval holds the most remaining red points."""
    if not redblue_verify(inst).hypothesis_holds:
        raise HypothesisFailed("some red interval carries too little blue weight")
    members = {x: inst.members(x) for x in inst.red}
    remaining = set(inst.red)
    steps = []
    while remaining:
        x = min(remaining, key=lambda y: (-len(members[y] & remaining), y))
        ix = members[x]
        steps.append(
            GreedyStep(
                x,
                inst.intervals[x],
                len(ix & remaining),
                len(ix & inst.red),
                inst.blue_weight(ix),
            )
        )
        remaining = {y for y in remaining if not (members[y] & ix)}
    return GreedyCertificate(steps, len(inst.red), inst.lam)


# --------------------------------------------------------------- happiness

@dataclass
class HappinessReport:
    alpha1: Fraction
    happy: frozenset[int]
    sad: frozenset[int]
    # touching -> witness arcs (at most one per curve and direction)
    witnesses: dict[int, list[Arc]] = field(default_factory=dict)

    @property
    def counts(self) -> dict[str, int]:
        return {"touchings": len(self.happy) + len(self.sad), "happy": len(self.happy), "sad": len(self.sad)}


def _scan_witness(seq, i, kinds, alpha1, step):
    xs = ts = 0
    L = len(seq)
    for s in range(L):
        p = seq[(i + step * s) % L]
        if kinds[p] == CROSSING:
            xs += 1
        else:
            ts += 1
        if xs >= alpha1 * ts:
            return p
    return None


def happy_witnesses(arr: Arrangement, curve: str, pid: int, alpha1) -> list[Arc]:
    """Shortest arcs of ``curve`` ending at pid in each direction with enough crossings."""
    seq = arr.sequence(curve)
    kinds = {p: arr.points[p].kind for p in seq}
    i = arr.position(curve, pid)
    out = []
    end = _scan_witness(seq, i, kinds, alpha1, 1)
    if end is not None:
        out.append(Arc(curve, pid, end))
    start = _scan_witness(seq, i, kinds, alpha1, -1)
    if start is not None:
        out.append(Arc(curve, start, pid))
    return out


def classify_happy(arr: Arrangement, alpha1) -> HappinessReport:
    alpha1 = Fraction(alpha1)
    if alpha1 <= 0:
        raise ValueError("alpha1 must be positive")
    happy, sad = set(), set()
    witnesses = {}
    for pid in sorted(arr.T):
        w = []
        for cid in arr.points[pid].curves:
            w.extend(happy_witnesses(arr, cid, pid, alpha1))
        if w:
            happy.add(pid)
            witnesses[pid] = w
        else:
            sad.add(pid)
    return HappinessReport(alpha1, frozenset(happy), frozenset(sad), witnesses)


def curve_redblue_instance(arr: Arrangement, curve: str, report: HappinessReport) -> RedBlueInstance:
    """Covering instance on one curve: red = curve-happy touchings, blue = crossings (weight 1)."""
    seq = arr.sequence(curve)
    red, intervals = set(), {}
    for pid in seq:
        if pid not in report.happy:
            continue
        arcs = [a for a in report.witnesses[pid] if a.curve == curve]
        if not arcs:
            continue
        a = arcs[0]
        i = arr.position(curve, pid)
        red.add(i)
        intervals[i] = (arr.position(curve, a.start), arr.position(curve, a.end))
    weights = {i: Fraction(1) for i, p in enumerate(seq) if arr.points[p].kind == CROSSING}
    return RedBlueInstance(len(seq), frozenset(red), weights, report.alpha1, intervals, cyclic=True)


@dataclass(frozen=True)
class HappyAudit:
    lhs: int  # |T| - |T'|
    rhs: Fraction  # 6 |X| / alpha1
    holds: bool


def audit_happy_bound(arr: Arrangement, report: HappinessReport, alpha1=None) -> HappyAudit:
    alpha1 = Fraction(report.alpha1 if alpha1 is None else alpha1)
    lhs = len(arr.T) - len(report.sad)
    rhs = Fraction(6 * len(arr.X)) / alpha1
    return HappyAudit(lhs, rhs, lhs <= rhs)
