from fractions import Fraction

import pytest

from touchcross.arrangement import REPORT_ONLY, SadUndefined, enumerate_lenses, extract_arrangement
from touchcross.charging import (
    ChargeLedger,
    EmptySchedule,
    PhaseParams,
    analyze_family,
    check_richter_thomassen,
    compute_poor,
    default_schedule,
    enumerate_poor_arcs,
    rule2_amount,
    run_phase,
    run_rule1,
    run_rule2,
    run_schedule,
    scale_exponents,
    schedule_from_scales,
)
from touchcross.generators import circle_polygon, gen_counterexample, gen_random_intersecting, gen_tangent_family

from families import charged, make
from oracles import BruteCharging

F = Fraction


def rows(records):
    return sorted((r.phase, r.rule, r.accounted_source, r.source, r.target, r.amount) for r in records)


# all three pairs touch, every touching sad
TRIANGLE = make(
    {"a": [0, 1], "b": [0, 2], "c": [1, 2]},
    {0: "touching", 1: "touching", 2: "touching"},
    sad={0, 1, 2},
)


def test_phase_parameters():
    p = PhaseParams(4, F(1, 2), 10)
    assert p.alpha == F(5, 2)
    assert p.v == 21000 * F(5, 2) ** 8
    assert p.w == F(64, 2000 * F(5, 2) ** 5 * 100)
    assert p.lens_cap == 3 * F(5, 2) ** 3 * 4
    with pytest.raises(ValueError):
        PhaseParams(0, 1, 3)
    with pytest.raises(ValueError):
        PhaseParams(1, -1, 3)


@pytest.mark.parametrize(
    "n, expected",
    [(2, []), (15, []), (16, [1]), (100, [1]), (2**15, [1]), (2**16, [1, 2]), (2**32, [2])],
)
def test_scale_exponents(n, expected):
    assert scale_exponents(n) == expected


def test_default_schedule():
    with pytest.raises(EmptySchedule, match="loglog"):
        default_schedule(10)
    s = default_schedule(100, 1)
    assert s.M == 1
    assert s.phases[0].k == F(80 * 9 * 100, 8)
    with pytest.raises(EmptySchedule):
        schedule_from_scales(5, 1, [])


def test_rule2_amount_formula():
    class P:
        v, k, w = F(1), F(4), F(1, 2)

    assert rule2_amount(P, 2) == F(1, 10)
    p = PhaseParams(3, 1, 5)
    assert rule2_amount(p, 2) == p.v / (p.k * (2 + p.w))


def test_rule1_small_curve_charges_everything():
    p = PhaseParams(3, 1, 3)
    recs = run_rule1(TRIANGLE, p)
    assert {(r.accounted_source, r.target) for r in recs} == {(x, t) for x in range(3) for t in range(3)}
    assert all(r.amount == F(1, 3) for r in recs)


def test_rule1_length_bound():
    arr = make(
        {"a": [0, 1, 2, 3, 4, 5], "b": [0], "c": [1], "d": [2], "e": [3], "f": [4], "g": [5]},
        {i: "touching" for i in range(6)},
        sad=range(6),
    )
    recs = run_rule1(arr, PhaseParams(1, 1, 7))
    # with k = 1 only the point itself is within reach
    assert {(r.accounted_source, r.target) for r in recs} == {(i, i) for i in range(6)}
    recs = run_rule1(arr, PhaseParams(2, 1, 7))
    got = {(r.accounted_source, r.target) for r in recs}
    assert (0, 1) in got and (0, 5) in got and (0, 2) not in got


def test_rules_need_sad_set():
    with pytest.raises(SadUndefined):
        run_rule1(make({"a": [0], "b": [0]}, {0: "touching"}), PhaseParams(1, 1, 2))


def test_no_touchings_empty_ledger():
    fam = [circle_polygon("a", (0, 0), 1, 32), circle_polygon("b", (1, 0), 1, 32)]
    arr = charged(fam, 1)
    res = run_schedule(arr, schedule_from_scales(arr.n, 1, [1, 2]))
    assert len(res.ledger) == 0
    assert res.ok


def test_zero_charge_is_poor():
    arr = make({"a": [0], "b": [0]}, {0: "touching"}, sad={0})
    assert compute_poor(arr, [], PhaseParams(1, 1, 2)) == frozenset({0})


def test_rule3_on_touching_triangle():
    p = PhaseParams(3, F(1, 4), 3)
    res = run_phase(TRIANGLE, p)
    assert res.poor == frozenset({0, 1, 2})
    r3 = [r for r in res.records if r.rule == 3]
    assert {(r.accounted_source, r.target) for r in r3} == {(x, t) for x in range(3) for t in range(3) if x != t}
    assert all(r.amount == 2 * p.alpha / p.k for r in r3)
    assert rows(res.records) == BruteCharging(TRIANGLE).phase(p)


def test_rule3_suppressed_when_crowded():
    # k / alpha < 1, so even a single poor arc exceeds the threshold
    res = run_phase(TRIANGLE, PhaseParams(2, F(1, 4), 3))
    assert res.poor_arcs == 6
    assert not [r for r in res.records if r.rule == 3]


def test_poor_arcs_respect_length():
    p = PhaseParams(3, F(1, 4), 3)
    arcs, same, missing = enumerate_poor_arcs(TRIANGLE, p, {0})
    assert same == 0 and missing == 0
    assert {(a.start, a.end, a.apex) for a in arcs} == {(0, 1, 2), (0, 2, 1)}


def test_rule2_on_crossing_family():
    fam = gen_tangent_family(5, 16, seed=2)
    arr = charged(fam, 20)
    p = PhaseParams(2, 20, arr.n)
    recs = run_rule2(arr, p, enumerate_lenses(arr))
    assert recs
    for r in recs:
        assert r.source.startswith("L")
    assert rows(run_phase(arr, p).records) == BruteCharging(arr).phase(p)


def test_ledger_views_and_determinism():
    fam = gen_counterexample(6, 3, 16)
    arr = charged(fam, 16, REPORT_ONLY)
    sched = schedule_from_scales(arr.n, 16, [1, 2, 4])
    a, b = run_schedule(arr, sched), run_schedule(arr, sched)
    assert a.ledger == b.ledger
    assert [r for r in a.ledger.records] == sorted(a.ledger.records)
    total = sum(a.ledger.by_rule().values())
    assert total == sum(a.ledger.by_target().values()) == sum(a.ledger.by_phase().values())
    assert a.ok
    assert ChargeLedger() == ChargeLedger([])


def test_amounts_come_from_the_three_formulas():
    arr = charged(gen_tangent_family(6, 16, seed=1), 24)
    sched = schedule_from_scales(arr.n, 24, [1, 2, 3])
    res = run_schedule(arr, sched)
    for r in res.ledger.records:
        p = sched.phases[r.phase]
        if r.rule == 1:
            assert r.amount == 1 / p.k
        elif r.rule == 3:
            assert r.amount == 2 * p.alpha / p.k
        else:
            assert any(r.amount == rule2_amount(p, l) for l in range(1, int(p.lens_cap) + 1))


def test_audit_names():
    arr = charged(gen_counterexample(5, 2, 16), 16, REPORT_ONLY)
    res = run_schedule(arr, schedule_from_scales(arr.n, 16, [1, 2]))
    names = [a.name.split()[0] for a in res.audits]
    assert names == ["A1", "A2", "A3", "A4", "conservation", "small-curves:"]
    assert res.audit("A1").holds
    assert not res.audit("A3").asserted


def test_analyze_two_crossing_circles():
    fam = [circle_polygon("a", (0, 0), 1, 32), circle_polygon("b", (1, 0), 1, 32)]
    s = analyze_family(extract_arrangement(fam), 1)
    assert (s["X"], s["T"], s["ratio"]) == (2, 0, "inf")
    assert s["happy_bound"]["holds"]


def test_analyze_counterexample():
    arr = extract_arrangement(gen_counterexample(20, 5, 16), REPORT_ONLY)
    s = analyze_family(arr, F(1, 2))
    assert s["T"] == 75 and s["X"] <= 150 and s["ratio"] <= 2


def test_richter_thomassen_regimes():
    fam = gen_random_intersecting(5, 1, 16)
    res = check_richter_thomassen(extract_arrangement(fam))
    assert res["regime"] == "touching-free" and res["total"] >= 20 and res["holds"]
    three = check_richter_thomassen(extract_arrangement(gen_tangent_family(3, 16, all_touching=True)))
    assert three["X"] == 0 and three["T"] == 3 and three["trivial_bound_holds"]
    comb = check_richter_thomassen(extract_arrangement(gen_counterexample(8, 3, 16), REPORT_ONLY))
    assert not comb["pairwise_intersecting"]
