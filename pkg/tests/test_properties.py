import random
from fractions import Fraction

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from touchcross.geometry import TANGENTIAL, ClosedCurve, OverlapError, intersect_pair
from touchcross.happiness import redblue_greedy, redblue_verify
from touchcross.io import format_rational, parse_rational

from families import random_redblue
from oracles import _seg_intersections, oracle_local_tangential


def hull(points):
    pts = sorted(set(points))
    if len(pts) < 3:
        return []

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and (out[-1][0] - out[-2][0]) * (p[1] - out[-2][1]) - (
                out[-1][1] - out[-2][1]
            ) * (p[0] - out[-2][0]) <= 0:
                out.pop()
            out.append(p)
        return out

    lower, upper = half(pts), half(pts[::-1])
    return lower[:-1] + upper[:-1]


coord = st.integers(-6, 6)
polygons = st.lists(st.tuples(coord, coord), min_size=3, max_size=7).map(hull).filter(lambda h: len(h) >= 3)


@settings(max_examples=300, deadline=None)
@given(polygons, polygons)
def test_pair_matches_all_edges_oracle(pa, pb):
    a, b = ClosedCurve("a", pa), ClosedCurve("b", pb)
    try:
        hits = intersect_pair(a, b)
    except OverlapError:
        assume(False)
    fa = [(Fraction(x), Fraction(y)) for x, y in pa]
    fb = [(Fraction(x), Fraction(y)) for x, y in pb]
    expected = set()
    for i in range(len(fa)):
        for j in range(len(fb)):
            expected.update(_seg_intersections(fa[i], fa[(i + 1) % len(fa)], fb[j], fb[(j + 1) % len(fb)]))
    assert {(h.point.x, h.point.y) for h in hits} == expected
    for h in hits:
        c = (h.point.x, h.point.y)
        assert (h.local_type == TANGENTIAL) == oracle_local_tangential(fa, fb, c)
    # two closed convex curves: transversal meetings come in pairs
    assert sum(1 for h in hits if h.local_type != TANGENTIAL) % 2 == 0


@given(st.fractions(max_denominator=10**6))
def test_rational_text_roundtrip(q):
    assert parse_rational(format_rational(q)) == q


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_redblue_conclusion(seed):
    inst = random_redblue(random.Random(seed), 30)
    chk = redblue_verify(inst)
    assert chk.hypothesis_holds and chk.conclusion_holds
    assert redblue_greedy(inst).holds()
