"""Acceptance criteria, one test each. Every test prints a single PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from progeny.enumeration import enumerate_forests
from progeny.families import descending_chain_example, tail_path_example, three_trees_example
from progeny.forest import candidate_set, remove_out_edge
from progeny.mechanisms import (
    ExactMechanism,
    FairMechanism,
    FunctionGenerated,
    GeneratorTable,
    IntervalShare,
    SmoothedFairMechanism,
    extract_generator,
    fair_closed_form,
)
from progeny.verify import audit_fairness, audit_ic, demo_overdistribution, demo_upper_bound, probe_proportionality, quality

from conftest import ACCEPTANCE_LINES, random_forest

log2 = math.log2
N_MAX = 6


def record(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def has_top_tie(f) -> bool:
    """True if F, or F_x for some non-root x, has two roots of maximal progeny."""
    def tied(g):
        t = g.table
        return sum(t.p[r] == t.pstar for r in g.roots) > 1

    return tied(f) or any(tied(remove_out_edge(f, x)) for x in range(f.n) if f.parent[x] is not None)


def all_forests(n_max=N_MAX):
    for n in range(1, n_max + 1):
        yield from enumerate_forests(n)


@pytest.fixture(scope="module")
def fair():
    return FairMechanism()


@pytest.fixture(scope="module")
def exact():
    return ExactMechanism()


def test_criterion_1_worked_examples():
    start = time.perf_counter()
    mf, mb = FairMechanism(), ExactMechanism()
    devs = []

    f, v = tail_path_example()
    d = mf.evaluate(f)
    devs += [abs(d[v["b"]] - 0.5), abs(d.total - (0.5 + 0.5 * log2(10 / 6)))]

    f, v = descending_chain_example()
    devs.append(abs(mf.evaluate(f).total - 0.5 * log2(2.5)))

    f, v = three_trees_example()
    d = mb.evaluate(f)
    devs += [
        abs(d[v["a_1"]] - log2(4 / 3) / 3),
        abs(d[v["c_1"]] - log2(8 / 5) / 3),
        abs(d.total - 1.0),
    ]
    elapsed = time.perf_counter() - start
    worst = max(devs)
    ok = worst <= 1e-9 and elapsed < 1.0
    record(1, ok, f"worked examples max|dev|={worst:.2e} (tol 1e-9), {elapsed:.3f}s (< 1s)")
    assert ok


def test_criterion_2_exhaustive_ic(fair, exact):
    start = time.perf_counter()
    reports = [audit_ic(m, N_MAX) for m in (fair, exact)]
    elapsed = time.perf_counter() - start
    counts = {r.mechanism: r.n_violations for r in reports}
    examined = reports[0].examined
    n6 = sum(1 for _ in enumerate_forests(6))
    ok = all(c == 0 for c in counts.values()) and n6 == 16807 and elapsed < 60
    record(2, ok, f"IC violations {counts} over {examined} forests (n<=6, {n6} at n=6), {elapsed:.1f}s (< 60s)")
    assert ok


def test_criterion_3_mass(fair, exact):
    bad_exact = bad_fair = bad_support = 0
    worst_total = 0.0
    lowest = math.inf
    for f in all_forests():
        d = exact.evaluate(f)
        worst_total = max(worst_total, abs(d.total - 1))
        lowest = min(lowest, float(d.probs.min()))
        if abs(d.total - 1) > 1e-9 or d.probs.min() < -1e-9:
            bad_exact += 1
        g = fair.evaluate(f)
        if g.total > 1 + 1e-12 or g.probs.min() < 0:
            bad_fair += 1
        if sorted(g.support()) != sorted(candidate_set(f)):
            bad_support += 1
    ok = bad_exact == bad_fair == bad_support == 0
    record(3, ok, f"exact rule max|total-1|={worst_total:.1e}, min prob={lowest:.1e}; "
                  f"fair rule over-total={bad_fair}, support mismatches={bad_support}")
    assert ok


def test_criterion_4_quality(fair, exact):
    q_fair = q_exact = math.inf
    single_dev = 0.0
    singles = 0
    for f in all_forests():
        qf = quality(fair, f).q
        q_fair = min(q_fair, qf)
        q_exact = min(q_exact, quality(exact, f).q)
        if len(candidate_set(f)) == 1:
            singles += 1
            single_dev = max(single_dev, abs(qf - 0.5))
    lower_fair = 1 / math.log(16)
    ok = q_fair >= lower_fair - 1e-9 and q_exact >= 1 / 3 - 1e-9 and single_dev <= 1e-12
    record(4, ok, f"min Q fair={q_fair:.6f} (>= {lower_fair:.6f}), min Q exact={q_exact:.6f} (>= 1/3), "
                  f"|Q-1/2| on {singles} single-candidate forests <= {single_dev:.1e}")
    assert ok


def test_criterion_5_upper_bound():
    results = {m.spec: demo_upper_bound(m, 8)["min_q"] for m in (FairMechanism(), ExactMechanism())}
    ok = all(q <= 0.8 + 1e-9 for q in results.values())
    record(5, ok, "min(Q apart, Q joined) at n=8: " + ", ".join(f"{k}={q:.6f}" for k, q in results.items())
           + " (<= 4/5)")
    assert ok


def test_criterion_6_closed_form(fair):
    worst = 0.0
    for f in all_forests():
        worst = max(worst, float(np.max(np.abs(fair.evaluate(f).probs - fair_closed_form(f).probs))))

    f, v = three_trees_example()
    d = IntervalShare().evaluate(f)
    want = {
        "a_1": log2(6 / 5) / 3,
        "a_2": log2(7 / 6) / 3 + log2(8 / 7) / 3,
        "a_3": 0.5 * log2(9 / 8) + log2(10 / 9),
        "b_1": log2(7 / 5) / 3,
        "b_2": log2(8 / 7) / 3 + 0.5 * log2(9 / 8),
        "c_1": log2(8 / 5) / 3,
    }
    share_dev = max(abs(d[v[k]] - val) for k, val in want.items())
    total_dev = abs(d.total - 1)
    ok = worst <= 1e-12 and total_dev <= 1e-9 and share_dev <= 1e-9
    record(6, ok, f"closed form vs recursion max|dev|={worst:.1e} (tol 1e-12); interval share "
                  f"|total-1|={total_dev:.1e}, six values max|dev|={share_dev:.1e}")
    assert ok


def test_criterion_7_fairness():
    fair_rep = audit_fairness(FairMechanism(), N_MAX)

    epsilons = (1e-2, 1e-4, 1e-6)
    f, _ = three_trees_example()
    t = f.table
    ratio_dev = 0.0
    for eps in epsilons:
        d = SmoothedFairMechanism(eps).evaluate(f)
        for r in f.roots:
            want = eps ** (t.pstar - t.p[r])
            ratio_dev = max(ratio_dev, abs(d[r] / d[t.r1] - want) / want)

    rng = np.random.default_rng(2024)
    mf = FairMechanism()
    not_decreasing = with_top_tie = 0
    for _ in range(100):
        g = random_forest(rng, int(rng.integers(1, 13)))
        target = mf.evaluate(g).probs
        dist = [float(np.max(np.abs(SmoothedFairMechanism(e).evaluate(g).probs - target))) for e in epsilons]
        # strictly smaller whenever the rules differ at all
        if not all(a > b or a == b == 0 for a, b in zip(dist, dist[1:])):
            not_decreasing += 1
            with_top_tie += has_top_tie(g)

    probe = probe_proportionality(ExactMechanism(), 4)
    L = log2(4 / 3)
    closed = abs((1 + 2 * L) / (1 - L) - (1 + L) / (1 - L))
    probe_ok = probe["change"] > 0.1 and abs(probe["change"] - closed) <= 1e-9

    ok = fair_rep.passed and ratio_dev <= 1e-9 and not_decreasing == 0 and probe_ok
    record(7, ok, f"fair monotonicity violations={fair_rep.n_violations}; smoothed ratio rel dev={ratio_dev:.1e}; "
                  f"distance not strictly decreasing on {not_decreasing}/100 forests "
                  f"({with_top_tie} of them have tied top roots in F or some F_x); exact-rule ratio change="
                  f"{probe['change']:.6f} (closed form {closed:.6f}, > 0.1)")
    assert ok


def test_criterion_8_overdistribution():
    start = time.perf_counter()
    table = GeneratorTable.from_function(lambda p: 2.0**p, 62)
    rep = demo_overdistribution(table, 10, 20, extras=2)
    elapsed = time.perf_counter() - start
    h = rep.hypotheses
    ok = (
        rep.n == 62
        and h["1"]["holds"] and h["2"]["holds"] and h["3"]["holds"] and h["4"]["holds"]
        and rep.k == 1 and rep.m == 1024
        and rep.nonroot_mass > 1
        and abs(rep.nonroot_mass - 1.1658336972468326) <= 1e-9
        and elapsed < 1.0
    )
    record(8, ok, f"k={rep.k:g}, m={rep.m:g}, n f(1)/f(b)={h['2']['value']:.2e}, f(a)/f(2a)={h['4']['value']:.2e}; "
                  f"non-root mass={rep.nonroot_mass:.12f} (> 1), {elapsed:.3f}s (< 1s)")
    assert ok


def test_criterion_9_round_trip():
    gens = {"1": lambda k: 1.0, "k": float, "k^2": lambda k: float(k * k), "2^k": lambda k: 2.0**k}
    forests = [f for f in all_forests() if len(f.roots) >= 3]
    worst = 0.0
    for fn in gens.values():
        original = FunctionGenerated(GeneratorTable.from_function(fn, N_MAX))
        rebuilt = FunctionGenerated(extract_generator(original, N_MAX))
        for f in forests:
            a, b = original.evaluate(f).probs, rebuilt.evaluate(f).probs
            worst = max(worst, float(np.max(np.abs(a - b))))
    ok = worst <= 1e-9
    record(9, ok, f"rebuilt vs original on {len(forests)} forests with >= 3 roots, "
                  f"f in {{{', '.join(gens)}}}: max|dev|={worst:.1e} (tol 1e-9)")
    assert ok
