"""Acceptance criteria, one test each; the summary prints a PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py`` (or ``python3 tests/test_acceptance.py``).
"""
import os
import random
import subprocess
import sys
import time
from fractions import Fraction
from math import comb

import pytest

from touchcross.arrangement import REPORT_ONLY, STRICT, extract_arrangement
from touchcross.charging import check_richter_thomassen, run_schedule, schedule_from_scales
from touchcross.generators import gen_counterexample, gen_random_intersecting, gen_tangent_family
from touchcross.geometry import classify_pair, validate_general_position
from touchcross.happiness import audit_happy_bound, classify_happy, redblue_greedy, redblue_verify

from families import charged_corpus, descartes_family, generated_corpus, random_redblue, small_charged_corpus
from oracles import BruteCharging, all_pairs, oracle_pair, polygon

ALPHAS = (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2))


@pytest.fixture(scope="module")
def corpus_runs():
    """Every charged instance of both corpora with its schedule result."""
    runs = []
    for label, arr, alpha1, scales in charged_corpus() + small_charged_corpus():
        sched = schedule_from_scales(arr.n, alpha1, scales)
        runs.append((label, arr, sched, run_schedule(arr, sched)))
    return runs


def test_c01_pair_classification(criterion):
    start = time.perf_counter()
    families = []
    for seed in range(110):
        families.append(gen_random_intersecting(2 + seed % 9, seed, 8))
    for seed in range(110):
        n = 2 + seed % 9
        families.append(gen_tangent_family(n, 12, seed=seed, touching=seed % (n // 2 + 1)))
    mismatches, odd, pairs = [], 0, 0
    for fi, fam in enumerate(families):
        rep = validate_general_position(fam, strict=True)
        assert rep.valid
        for i, j in all_pairs(fam):
            hits = rep.hits[(i, j)]
            count, kind, transversal = oracle_pair(polygon(fam[i]), polygon(fam[j]))
            got_kind = classify_pair(hits)[0] if hits else "disjoint"
            got_trans = sum(1 for h in hits if h.local_type == "transversal")
            pairs += 1
            if (len(hits), got_kind, got_trans) != (count, kind, transversal):
                mismatches.append((fi, fam[i].id, fam[j].id))
            odd += transversal % 2
    elapsed = time.perf_counter() - start
    ok = not mismatches and odd == 0 and elapsed < 60 and len(families) >= 200
    criterion(1, "pair classification vs all-edge-pairs oracle", ok,
              f"{len(families)} families, {pairs} pairs, {len(mismatches)} mismatches, "
              f"{odd} odd-parity pairs, {elapsed:.1f}s")
    assert ok, mismatches[:5]


def test_c02_counterexample_ground_truth(criterion):
    rows, ok = [], True
    for n, k in ((10, 3), (20, 5), (40, 8)):
        arr = extract_arrangement(gen_counterexample(n, k), REPORT_ONLY)
        X, T = len(arr.X), len(arr.T)
        good = T == k * (n - k) and X <= comb(k, 2) * (n - k) and Fraction(X, T) <= Fraction(k - 1, 2)
        ok &= good
        rows.append(f"({n},{k}): |T|={T} |X|={X}")
    criterion(2, "counterexample |T| = k(n-k), |X| <= C(k,2)(n-k)", ok, "; ".join(rows))
    assert ok


def test_c03_redblue(criterion):
    rng = random.Random(2024)
    failures = 0
    count = 600
    for _ in range(count):
        inst = random_redblue(rng, 50)
        chk = redblue_verify(inst)
        cert = redblue_greedy(inst)
        if not (chk.hypothesis_holds and chk.conclusion_holds and 3 * cert.red_covered >= len(inst.red)
                and cert.holds()):
            failures += 1
    criterion(3, "Red-Blue conclusion and greedy certificate", failures == 0,
              f"{count} instances, {failures} failures")
    assert failures == 0


def test_c04_happy_bound(criterion):
    checks, bad = 0, []
    for label, fam, mode in generated_corpus():
        arr = extract_arrangement(fam, mode)
        for a in ALPHAS:
            audit = audit_happy_bound(arr, classify_happy(arr, a))
            checks += 1
            if not audit.holds:
                bad.append((label, a))
    criterion(4, "|T| - |T'| <= 6|X|/alpha1", not bad, f"{checks} (family, alpha1) checks, {len(bad)} violations")
    assert not bad


def test_c05_out_charge(criterion, corpus_runs):
    bad = [label for label, _, _, res in corpus_runs if not res.audit("A1").holds]
    worst = max((res.audit("A1").detail["max_rule13"] for *_, res in corpus_runs), default=0)
    phases = sum(s.M for _, _, s, _ in corpus_runs)
    records = sum(len(res.ledger) for *_, res in corpus_runs)
    criterion(5, "per-source out-charge: rule 1 <= 4, rule 3 <= 4", not bad,
              f"{len(corpus_runs)} instances, {phases} phases, {records} records, max combined {worst}")
    assert not bad


def test_c06_small_curves(criterion, corpus_runs):
    checked = violations = below = poor_below = 0
    for *_, res in corpus_runs:
        d = res.audit("small-curves").detail
        checked += d["curves_checked"]
        violations += len(d["violations"])
        below += d["curves_below_alpha_k"]
        poor_below += len(d["poor_on_curves_below_alpha_k"])
    ok = violations == 0 and checked > 0
    criterion(6, "curves with <= k sad points and |X'∩a| >= alpha*k carry no poor point", ok,
              f"{checked} curve-phases checked, {violations} violations; without the |X'∩a| >= alpha*k "
              f"condition {poor_below} poor points occur on {below} curve-phases (reported)")
    assert ok


def test_c07_ledger_oracle(criterion):
    corpus = small_charged_corpus()
    mismatched, rules = [], set()
    records = 0
    for label, arr, alpha1, scales in corpus:
        assert arr.n <= 8
        sched = schedule_from_scales(arr.n, alpha1, scales)
        ledger = run_schedule(arr, sched).ledger
        rules.update(ledger.by_rule())
        got = sorted((r.phase, r.rule, r.accounted_source, r.source, r.target, r.amount) for r in ledger.records)
        brute = BruteCharging(arr)
        want = sorted(row for i, p in enumerate(sched.phases) for row in brute.phase(p, i))
        records += len(got)
        if got != want:
            mismatched.append(label)
    ok = not mismatched and len(corpus) >= 50
    criterion(7, "ledger identical to brute-force rules", ok,
              f"{len(corpus)} families, {records} records, rules exercised {sorted(rules)}, "
              f"{len(mismatched)} mismatches")
    assert ok, mismatched


def test_c08_richter_thomassen(criterion):
    strict = [fam for _, fam, mode in generated_corpus() if mode == STRICT]
    strict += [gen_tangent_family(n, 16, seed=s) for n in (6, 9, 12) for s in range(3)]
    strict.append(descartes_family())
    free = [gen_random_intersecting(n, s, 16) for n in (2, 4, 6, 8, 10) for s in range(3)]
    bad = []
    for fam in strict + free:
        res = check_richter_thomassen(extract_arrangement(fam))
        if not res["trivial_bound_holds"] or (res["T"] == 0 and not res["total_at_least_n2_minus_n"]):
            bad.append([c.id for c in fam])
    criterion(8, "|X| >= 2(C(n,2)-|T|); touching-free |X|+|T| >= n^2-n", not bad,
              f"{len(strict)} strict families, {len(free)} touching-free, {len(bad)} violations")
    assert not bad


def test_c09_lens_accounting(criterion, corpus_runs):
    bad, charged_lenses, flag = [], 0, []
    for label, arr, sched, res in corpus_runs:
        brute = BruteCharging(arr)
        length = {f"L{x}@{c}": sum(1 for p in brute.arc(c, x, y) if p in brute.sad) for c, x, y in brute.lenses()}
        for r in res.ledger.records:
            if r.rule != 2:
                continue
            p = sched.phases[r.phase]
            l = length[r.source]
            if l > 3 * p.alpha**3 * p.k or r.amount != p.v / (p.k * (l + p.w)):
                bad.append((label, r))
        a2 = res.audit("A2")
        bad += [(label, v) for v in a2.detail["violations"]]
        charged_lenses += len(a2.detail["lens_totals"])
        flag.append(a2.detail["M_at_least_3v"])
    ok = not bad
    criterion(9, "rule-2 amounts v/(k(l+w)) and cap l <= 3 alpha^3 k", ok,
              f"{charged_lenses} charged lenses, {len(bad)} violations; "
              f"reported: M >= 3v holds in {sum(flag)} of {len(flag)} runs (unattainable at desk scale)")
    assert ok


def _cli_outputs(tmp, threads):
    env = dict(os.environ, TOUCHCROSS_THREADS=str(threads))
    out = {}

    def run(*args):
        subprocess.run([sys.executable, "-m", "touchcross", *args], env=env, check=True, capture_output=True)

    for name, gen in (("comb", ["counterexample", "--n", "10", "--k", "3", "--resolution", "16"]),
                      ("tangent", ["tangent_chain", "--n", "8", "--seed", "3", "--resolution", "16"])):
        fam = tmp / f"{name}-{threads}.json"
        run("generate", *gen, "--out", str(fam))
        runs = tmp / f"{name}-{threads}"
        charge = ["--mode", "report-only", "--alpha1", "16", "--scales", "1,2,4"]
        run("charge", str(fam), *charge, "--out", str(runs))
        svg = tmp / f"{name}-{threads}.svg"
        run("render", str(fam), *charge, "--layers", "touchings,crossings,lenses,charges", "--out", str(svg))
        for path in (fam, runs / "ledger.csv", runs / "report.json", svg):
            out[f"{name}:{path.name.replace(f'-{threads}', '')}"] = path.read_bytes()
    return out


def test_c10_determinism(criterion, tmp_path):
    dirs = [tmp_path / d for d in ("first", "again", "threaded")]
    for d in dirs:
        d.mkdir()
    first, again, threaded = (_cli_outputs(d, t) for d, t in zip(dirs, (1, 1, 2)))
    differ = sorted(k for k in first if first[k] != again[k] or first[k] != threaded[k])
    criterion(10, "byte-identical outputs across runs and thread counts", not differ,
              f"{len(first)} artefacts x 3 runs (threads 1, 1, 2), differing: {differ or 'none'}")
    assert not differ


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
