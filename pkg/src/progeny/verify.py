"""Audit harness: exhaustive property sweeps and constructive demonstrations."""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .enumeration import CapExceeded, enumerate_forests, max_n_cap
from .families import ForestFamilySpec, star_chains
from .forest import Forest, remove_out_edge
from .mechanisms import Distribution, GeneratorTable, Mechanism, MechanismError
from .starchain import StarChainSolver

__all__ = [
    "IC_TOL",
    "QualityResult",
    "Violation",
    "AuditReport",
    "quality",
    "audit_ic",
    "audit_mass",
    "audit_quality",
    "audit_fairness",
    "probe_proportionality",
    "demo_upper_bound",
    "HypothesisUnmet",
    "OverdistributionReport",
    "demo_overdistribution",
    "sweep",
    "AUDITS",
]

IC_TOL = 1e-9
MAX_WITNESSES = 25


@dataclass(frozen=True)
class QualityResult:
    expected_progeny: float
    pstar: int
    q: float


def quality(mechanism: Mechanism, forest: Forest, dist: Optional[Distribution] = None) -> QualityResult:
    dist = mechanism.evaluate(forest) if dist is None else dist
    t = forest.table
    expected = float(np.dot(dist.probs, t.p))
    return QualityResult(expected, t.pstar, expected / t.pstar)


@dataclass(frozen=True)
class Violation:
    forest: tuple
    where: str
    observed: float
    bound: float
    order: tuple = (0, 0)  # (n, enumeration index), for deterministic merging

    def as_dict(self) -> dict:
        return {"forest": list(self.forest), "where": self.where, "observed": self.observed, "bound": self.bound}


@dataclass
class AuditReport:
    kind: str
    mechanism: str
    examined: int = 0
    n_violations: int = 0
    violations: list = field(default_factory=list)
    extremal: Optional[tuple] = None  # (forest parents, q)
    elapsed: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.n_violations == 0

    def as_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "mechanism": self.mechanism,
            "passed": self.passed,
            "examined": self.examined,
            "n_violations": self.n_violations,
            "violations": [v.as_dict() for v in self.violations],
        }
        if self.extremal is not None:
            out["extremal"] = {"forest": list(self.extremal[0]), "q": self.extremal[1]}
        if self.notes:
            out["notes"] = self.notes
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = f"{self.kind:<12} {self.mechanism:<14} {status:<5} forests={self.examined:<7} violations={self.n_violations}"
        if self.extremal is not None:
            line += f"  min_q={self.extremal[1]:.9f}"
        line += f"  ({self.elapsed:.2f}s)"
        rows = [line]
        for v in self.violations[:5]:
            rows.append(f"    {v.where}: observed={v.observed:.12g} bound={v.bound:.12g} forest={list(v.forest)}")
        return "\n".join(rows)


# Per-forest checks ---------------------------------------------------------
# Each returns (violations, quality or None, extra records).

def _check_ic(mech, forest, opts):
    d = mech.evaluate(forest)
    out = []
    for x, p in enumerate(forest.parent):
        if p is None:
            continue
        alone = mech.evaluate(remove_out_edge(forest, x))[x]
        if abs(d[x] - alone) > opts.get("tol", IC_TOL):
            out.append(Violation(forest.parent, f"vertex {x}", d[x], alone))
    return out, None, None


def _check_mass(mech, forest, opts):
    d = mech.evaluate(forest)
    out = []
    if opts.get("mode", "exact") == "exact":
        if abs(d.total - 1.0) > 1e-9:
            out.append(Violation(forest.parent, "total", d.total, 1.0))
        lo = -1e-9
    else:
        if d.total > 1 + 1e-12:
            out.append(Violation(forest.parent, "total", d.total, 1.0))
        lo = -1e-12
    worst = int(np.argmin(d.probs))
    if d.probs[worst] < lo:
        out.append(Violation(forest.parent, f"vertex {worst}", d[worst], 0.0))
    return out, None, None


def _check_quality(mech, forest, opts):
    q = quality(mech, forest).q
    bound = opts["bound"]
    out = [Violation(forest.parent, "quality", q, bound)] if q < bound - 1e-9 else []
    return out, q, None


def _check_fairness(mech, forest, opts):
    d = mech.evaluate(forest)
    t = forest.table
    out = []
    roots = t.roots_ordered
    for i, x in enumerate(roots):
        for y in roots[i + 1:]:
            if t.p[x] > t.p[y] and d[x] < d[y] - 1e-12:
                out.append(Violation(forest.parent, f"roots {x}>{y}", d[x], d[y]))
    ratios = {}
    for x in roots:
        for y in roots:
            if x == y:
                continue
            key = (forest.n, t.p[x], t.p[y])
            if d[x] > 0 and d[y] > 0:
                ratios.setdefault(key, d[x] / d[y])
            else:
                ratios.setdefault(key, None)
    return out, None, ratios


_CHECKS: dict[str, Callable] = {
    "ic": _check_ic,
    "mass": _check_mass,
    "quality": _check_quality,
    "fairness": _check_fairness,
}
AUDITS = tuple(_CHECKS)


def _scan_chunk(args):
    mech, kind, opts, ns, forests, part, parts = args
    viols: list[Violation] = []
    n_viol = 0
    examined = 0
    extremal = None
    ratio_first: dict = {}
    ratio_lo: dict = {}
    ratio_hi: dict = {}
    undefined = 0
    check = _CHECKS[kind]

    def source():
        if forests is not None:
            for idx, f in enumerate(forests):
                yield (f.n, idx), f
            return
        for n in ns:
            for idx, f in enumerate(enumerate_forests(n, cap=opts.get("cap"))):
                yield (n, idx), f

    for order, forest in source():
        if order[1] % parts != part:
            continue
        examined += 1
        found, q, ratios = check(mech, forest, opts)
        n_viol += len(found)
        for v in found:
            if len(viols) < MAX_WITNESSES:
                viols.append(Violation(v.forest, v.where, v.observed, v.bound, order))
        if q is not None and (extremal is None or q < extremal[1]):
            extremal = (forest.parent, q, order)
        if ratios:
            for key, r in ratios.items():
                if r is None:
                    undefined += 1
                    continue
                rec = (order, r, forest.parent)
                if key not in ratio_first:
                    ratio_first[key] = ratio_lo[key] = ratio_hi[key] = rec
                else:
                    if r < ratio_lo[key][1]:
                        ratio_lo[key] = rec
                    if r > ratio_hi[key][1]:
                        ratio_hi[key] = rec
    return viols, n_viol, examined, extremal, (ratio_first, ratio_lo, ratio_hi, undefined)


def _run(mech: Mechanism, kind: str, n_max: int, forests: Optional[Sequence[Forest]] = None,
         jobs: int = 1, n_min: int = 1, **opts) -> AuditReport:
    start = time.perf_counter()
    ns = list(range(n_min, n_max + 1))
    forests = list(forests) if forests is not None else None
    cap = opts.get("cap") or max_n_cap()
    if forests is None and n_max > cap:
        # fail before scanning the smaller sizes
        raise CapExceeded(f"n={n_max} exceeds enumeration cap {cap} (set PROGENY_MAX_N to raise it)")
    jobs = max(1, int(jobs))
    tasks = [(mech, kind, opts, ns, forests, part, jobs) for part in range(jobs)]
    if jobs == 1:
        results = [_scan_chunk(tasks[0])]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_chunk, tasks))

    report = AuditReport(kind, mech.spec)
    all_viols = []
    extremal = None
    first, lo, hi = {}, {}, {}
    undefined = 0
    for viols, n_viol, examined, ext, ratio in results:
        report.examined += examined
        report.n_violations += n_viol
        all_viols.extend(viols)
        if ext is not None and (extremal is None or (ext[1], ext[2]) < (extremal[1], extremal[2])):
            extremal = ext
        r_first, r_lo, r_hi, r_undef = ratio
        undefined += r_undef
        for key, rec in r_first.items():
            if key not in first or rec[0] < first[key][0]:
                first[key] = rec
        for key, rec in r_lo.items():
            if key not in lo or (rec[1], rec[0]) < (lo[key][1], lo[key][0]):
                lo[key] = rec
        for key, rec in r_hi.items():
            if key not in hi or (-rec[1], rec[0]) < (-hi[key][1], hi[key][0]):
                hi[key] = rec

    if kind == "fairness":
        tol = opts.get("ratio_tol", 1e-9)
        for key in sorted(first):
            ref = first[key][1]
            for rec in (lo[key], hi[key]):
                if abs(rec[1] - ref) > tol * max(1.0, abs(ref)):
                    report.n_violations += 1
                    all_viols.append(Violation(rec[2], f"ratio P={key[1]}:{key[2]} (n={key[0]})", rec[1], ref, rec[0]))
                    break
        report.notes = {"ratio_keys": len(first), "undefined_ratios": undefined}

    all_viols.sort(key=lambda v: (v.order, v.where))
    report.violations = all_viols[:MAX_WITNESSES]
    if extremal is not None:
        report.extremal = (extremal[0], extremal[1])
    report.elapsed = time.perf_counter() - start
    return report


def audit_ic(mech: Mechanism, n_max: int = 6, forests=None, jobs: int = 1, tol: float = IC_TOL) -> AuditReport:
    """Check ``M(x; F) == M(x; F_x)`` for every vertex of every forest up to ``n_max``."""
    return _run(mech, "ic", n_max, forests, jobs, tol=tol)


def audit_mass(mech: Mechanism, n_max: int = 6, mode: str = "exact", forests=None, jobs: int = 1) -> AuditReport:
    if mode not in ("exact", "subdistribution"):
        raise ValueError(f"unknown mass mode {mode!r}")
    rep = _run(mech, "mass", n_max, forests, jobs, mode=mode)
    rep.notes = {"mode": mode}
    return rep


def audit_quality(mech: Mechanism, n_max: int = 6, bound: float = 0.0, forests=None, jobs: int = 1) -> AuditReport:
    rep = _run(mech, "quality", n_max, forests, jobs, bound=bound)
    rep.notes = {"bound": bound}
    return rep


def audit_fairness(mech: Mechanism, n_max: int = 6, forests=None, jobs: int = 1) -> AuditReport:
    """Root monotonicity per forest, plus a proportionality probe across forests.

    Ratios ``M(x)/M(y)`` are grouped by ``(n, P(x), P(y))``; pairs where
    either probability is zero are counted as undefined rather than flagged.
    """
    return _run(mech, "fairness", n_max, forests, jobs)


def probe_proportionality(mech: Mechanism, k: int = 4) -> dict:
    """Compare the ratio of a ``k``-star centre to a ``(k-1)``-star centre when a
    second ``(k-1)``-star is added, both forests padded to ``3k`` vertices."""
    n = 3 * k
    one = star_chains([(k,), (k - 1,)], n - (2 * k - 1))
    two = star_chains([(k,), (k - 1,), (k - 1,)], n - (3 * k - 2))
    d1 = mech.evaluate(one.forest)
    d2 = mech.evaluate(two.forest)
    c1, c2 = one.centres[0][0], one.centres[1][0]
    e1, e2 = two.centres[0][0], two.centres[1][0]
    r1 = d1[c1] / d1[c2] if d1[c2] > 0 else math.inf
    r2 = d2[e1] / d2[e2] if d2[e2] > 0 else math.inf
    return {
        "k": k,
        "n": n,
        "ratio_one_smaller": r1,
        "ratio_two_smaller": r2,
        "change": abs(r2 - r1),
        "proportional": abs(r2 - r1) <= 1e-9 * max(1.0, abs(r1)),
        "probs_one_smaller": (d1[c1], d1[c2]),
        "probs_two_smaller": (d2[e1], d2[e2]),
    }


def demo_upper_bound(mech: Mechanism, n: int = 8) -> dict:
    """Quality on two ``n/2``-stars, apart and joined centre to centre."""
    if n < 4 or n % 2:
        raise ValueError("n must be even and at least 4")
    apart = ForestFamilySpec("upper-pair", (n,), connected=False).layout().forest
    joined = ForestFamilySpec("upper-pair", (n,), connected=True).layout().forest
    q1 = quality(mech, apart).q
    q2 = quality(mech, joined).q
    worst = min(q1, q2)
    return {"n": n, "q_apart": q1, "q_joined": q2, "min_q": worst, "bound": 0.8, "holds": worst <= 0.8 + 1e-9}


class HypothesisUnmet(MechanismError):
    def __init__(self, failed: Sequence[str], report: "OverdistributionReport"):
        super().__init__(f"over-distribution hypotheses not met: {', '.join(failed)}")
        self.failed = tuple(failed)
        self.report = report


@dataclass
class OverdistributionReport:
    a: int
    b: int
    extras: int
    n: int
    k: float
    m: float
    hypotheses: dict
    subforests: dict  # name -> {"x1": .., ..., "nonroot_mass": ..}
    nonroot_mass: float
    lemma_bound: float

    @property
    def all_hypotheses(self) -> bool:
        return all(h["holds"] for h in self.hypotheses.values())

    @property
    def overdistributes(self) -> bool:
        return self.nonroot_mass > 1.0

    def as_dict(self) -> dict:
        return {
            "a": self.a, "b": self.b, "extras": self.extras, "n": self.n,
            "k": self.k, "m": self.m, "hypotheses": self.hypotheses,
            "subforests": self.subforests, "nonroot_mass": self.nonroot_mass,
            "lemma_bound": self.lemma_bound, "overdistributes": self.overdistributes,
        }


# links in the chain x1 -> x2 -> x3 -> x4
_SUBFORESTS = {
    "F1": (),
    "F2": (0,),
    "F3": (2,),
    "F4": (0, 2),
    "F5": (1,),
    "F6": (0, 1),
    "F": (0, 1, 2),
}


def demo_overdistribution(table: GeneratorTable, a: int, b: int, extras: int = 2,
                          slack: float = 1e-2, strict: bool = True) -> OverdistributionReport:
    """Evaluate a function-generated mechanism on the chain of stars ``b, b, a, a``.

    The vanishing terms of the construction are checked numerically at this
    ``n``: ``n f(1)/f(b)`` and ``f(a)/f(2a)`` must both be at most ``slack``.
    Raises :class:`HypothesisUnmet` (carrying the report) when ``strict`` and a
    condition fails.
    """
    spec = ForestFamilySpec("overpay", (a, b), extras)
    spec.validate()
    n = 2 * a + 2 * b + extras
    if table.size < n:
        raise MechanismError(f"generator table covers 1..{table.size}, need 1..{n}")
    f = table
    k = f(b) / f(2 * a)
    m = f(a + b) / f(2 * a)
    small_leaf = n * f(1) / f(b)
    small_half = f(a) / f(2 * a)
    hyp = {
        "1": {"desc": "b >= 2a", "value": b / (2 * a), "holds": b >= 2 * a},
        "2": {"desc": "n f(1)/f(b) small", "value": small_leaf, "holds": small_leaf <= slack},
        "3": {"desc": "m >= 7 k^2", "value": m / (7 * k * k), "holds": m >= 7 * k * k},
        "4": {"desc": "f(a)/f(2a) small", "value": small_half, "holds": small_half <= slack},
        "monotone": {"desc": "f non-decreasing", "value": float(table.is_monotone()), "holds": table.is_monotone()},
    }

    solver = StarChainSolver(table.array(), (b, b, a, a), (0, 1, 2), extras)
    subs = {}
    for name, links in _SUBFORESTS.items():
        mask = sum(1 << j for j in links)
        st = solver.state(mask)
        vals = {}
        for i in range(4):
            if i < 3 and mask >> i & 1:
                vals[f"x{i + 1}"] = st["link"][i]
            else:
                vals[f"x{i + 1}"] = st["root"][i]
        vals["nonroot_mass"] = st["nonroot_mass"]
        subs[name] = vals
    total = subs["F"]["nonroot_mass"]
    report = OverdistributionReport(
        a, b, extras, n, k, m, hyp, subs, total, 1 + 1 / (48 * k) if k > 0 else math.inf
    )
    failed = [key for key in ("1", "2", "3", "4") if not hyp[key]["holds"]]
    if failed and strict:
        raise HypothesisUnmet(failed, report)
    return report


def sweep(mechanisms: Iterable[Mechanism], n_max: int, audits: Sequence[str] = ("ic",),
          bound: float = 0.0, mass_mode: str = "exact", jobs: int = 1, forests=None) -> list[AuditReport]:
    """Run the requested audits for every mechanism; report order follows the inputs."""
    reports = []
    for mech in mechanisms:
        for kind in audits:
            if kind == "ic":
                reports.append(audit_ic(mech, n_max, forests, jobs))
            elif kind == "mass":
                reports.append(audit_mass(mech, n_max, mass_mode, forests, jobs))
            elif kind == "quality":
                reports.append(audit_quality(mech, n_max, bound, forests, jobs))
            elif kind == "fairness":
                reports.append(audit_fairness(mech, n_max, forests, jobs))
            else:
                raise ValueError(f"unknown audit {kind!r}")
    return reports
