"""Command-line front end: ``progeny {eval,audit,enumerate,family,examples,demo}``.

Exit codes: 0 success, 1 audit violation, 2 usage or parse error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

from . import verify
from .enumeration import CapExceeded, enumerate_forests
from .families import (
    InvalidSpec,
    descending_chain_example,
    parse_family,
    tail_path_example,
    three_trees_example,
)
from .forest import ForestError
from .forest_io import emit_forest, read_forest
from .intervals import DegenerateInterval
from .mechanisms import (
    ExactMechanism,
    FairMechanism,
    GeneratorTable,
    IntervalShare,
    MechanismError,
    NumericalOverflow,
    Symmetrized,
    _fmt,
    parse_mechanism,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

EXACT_BY_DESIGN = ("mb", "mprime", "uniform", "fg")


def _eval(args) -> int:
    mech = parse_mechanism(args.mechanism)
    forest = read_forest(args.forest)
    dist = mech.evaluate(forest)
    q = verify.quality(mech, forest, dist)
    if args.format == "json":
        body = dist.to_json()[:-1]
        print(
            f'{body}, "quality": {{"expected_progeny": {_fmt(q.expected_progeny)}, '
            f'"pstar": {q.pstar}, "q": {_fmt(q.q)}}}}}'
        )
        return EXIT_OK
    t = forest.table
    print(f"{'vertex':>6} {'parent':>6} {'progeny':>7} {'probability':>20}")
    for v in range(forest.n):
        par = "-" if forest.parent[v] is None else str(forest.parent[v])
        print(f"{v:>6} {par:>6} {t.p[v]:>7} {dist[v]:>20.12f}")
    print(f"total = {dist.total:.9f}  valid = {dist.valid}")
    print(f"quality = {q.q:.9f}  (E[P] = {q.expected_progeny:.9f}, P* = {q.pstar})")
    return EXIT_OK


def _audit(args) -> int:
    mech = parse_mechanism(args.mechanism)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    for c in checks:
        if c not in verify.AUDITS:
            raise argparse.ArgumentTypeError(f"unknown check {c!r}")
    if "quality" in checks and args.bound is None:
        raise argparse.ArgumentTypeError("--bound is required for the quality check")
    forests = [read_forest(p) for p in args.forest] if args.forest else None
    n_max = args.max_n
    if n_max is None:
        n_max = 5 if isinstance(mech, Symmetrized) else 6
    mode = args.mass_mode
    if mode is None:
        mode = "exact" if mech.spec.split(":")[0] in EXACT_BY_DESIGN else "subdistribution"
    reports = verify.sweep([mech], n_max, checks, bound=args.bound or 0.0, mass_mode=mode,
                           jobs=args.jobs, forests=forests)
    if args.format == "json":
        print(json.dumps([r.as_dict() for r in reports], sort_keys=True))
    else:
        for r in reports:
            print(r.to_text())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION


def _enumerate(args) -> int:
    if args.count:
        total = sum(1 for _ in enumerate_forests(args.n, unlabeled=args.unlabeled))
        print(total)
        return EXIT_OK
    for f in enumerate_forests(args.n, unlabeled=args.unlabeled):
        print(emit_forest(f))
    return EXIT_OK


def _family(args) -> int:
    spec = parse_family(args.spec, extras=args.extras, connected=args.connected)
    text = emit_forest(spec.layout().forest, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text.rstrip("\n"))
    return EXIT_OK


def golden_rows() -> list[tuple[str, float, float]]:
    """(label, computed, closed form) for every worked-example value."""
    log2 = math.log2
    rows = []
    fair = FairMechanism()

    f, v = tail_path_example()
    d = fair.evaluate(f)
    rows.append(("tail-path  fair(b)", d[v["b"]], 0.5))
    for i in range(1, 5):
        rows.append((f"tail-path  fair(c_{i})", d[v[f"c_{i}"]], 0.5 * log2((6 + i) / (5 + i))))
    rows.append(("tail-path  fair total", d.total, 0.5 + 0.5 * log2(10 / 6)))

    f, v = descending_chain_example()
    d = fair.evaluate(f)
    rows.append(("descending fair(a)", d[v["a"]], 0.0))
    rows.append(("descending fair(b)", d[v["b"]], 0.5 * log2(7 / 4)))
    rows.append(("descending fair(c)", d[v["c"]], 0.5 * log2(9 / 7)))
    rows.append(("descending fair(d)", d[v["d"]], 0.5 * log2(10 / 9)))
    rows.append(("descending fair total", d.total, 0.5 * log2(10 / 4)))

    f, v = three_trees_example()
    share = IntervalShare().evaluate(f)
    expected_share = {
        "a_1": log2(6 / 5) / 3,
        "a_2": log2(7 / 6) / 3 + log2(8 / 7) / 3,
        "a_3": 0.5 * log2(9 / 8) + log2(10 / 9),
        "b_1": log2(7 / 5) / 3,
        "b_2": log2(8 / 7) / 3 + 0.5 * log2(9 / 8),
        "c_1": log2(8 / 5) / 3,
    }
    for name, val in expected_share.items():
        rows.append((f"three-trees share({name})", share[v[name]], val))
    rows.append(("three-trees share total", share.total, 1.0))

    exact = ExactMechanism().evaluate(f)
    rows.append(("three-trees exact(a_1)", exact[v["a_1"]], log2(6 / 4.5) / 3))
    for name in ("a_2", "b_1", "b_2", "c_1"):
        rows.append((f"three-trees exact({name})", exact[v[name]], expected_share[name]))
    rows.append((
        "three-trees exact(a_3)",
        exact[v["a_3"]],
        0.5 * log2(9 / 8) + log2(10 / 9) - log2(6 / 4.5) / 3 + log2(6 / 5) / 3,
    ))
    rows.append(("three-trees exact(a_0)", exact[v["a_0"]], 0.0))
    rows.append(("three-trees exact total", exact.total, 1.0))
    return rows


def _examples(args) -> int:
    rows = golden_rows()
    worst = max(abs(c - e) for _, c, e in rows)
    if args.format == "json":
        print(json.dumps({
            "rows": [{"label": lab, "computed": c, "expected": e} for lab, c, e in rows],
            "max_abs_deviation": worst,
        }, sort_keys=True))
    else:
        for lab, c, e in rows:
            print(f"{lab:<28} computed={c:.12f} expected={e:.12f} dev={abs(c - e):.1e}")
        print(f"max |deviation| = {worst:.3e}")
    return EXIT_OK if worst <= 1e-9 else EXIT_VIOLATION


GENERATORS = {
    "pow2": lambda k: 2.0**k,
    "square": lambda k: float(k * k),
    "linear": float,
    "const": lambda k: 1.0,
}


def _demo(args) -> int:
    if args.kind == "upper-bound":
        mech = parse_mechanism(args.mechanism)
        res = verify.demo_upper_bound(mech, args.n)
        if args.format == "json":
            print(json.dumps(res, sort_keys=True))
        else:
            print(f"two {args.n // 2}-stars apart:  q = {res['q_apart']:.9f}")
            print(f"joined centre to centre: q = {res['q_joined']:.9f}")
            print(f"min q = {res['min_q']:.9f}  (must not exceed 4/5) -> {'ok' if res['holds'] else 'VIOLATED'}")
        return EXIT_OK if res["holds"] else EXIT_VIOLATION

    n = 2 * args.a + 2 * args.b + args.extras
    if args.generator in GENERATORS:
        table = GeneratorTable.from_function(GENERATORS[args.generator], n)
    else:
        table = GeneratorTable.load(args.generator)
    try:
        rep = verify.demo_overdistribution(table, args.a, args.b, args.extras, slack=args.slack)
        verdict_ok = rep.overdistributes
    except verify.HypothesisUnmet as exc:
        rep = exc.report
        verdict_ok = None
    if args.format == "json":
        out = rep.as_dict()
        out["verdict"] = None if verdict_ok is None else bool(verdict_ok)
        print(json.dumps(out, sort_keys=True))
    else:
        print(f"chain of stars b={args.b}, b, a={args.a}, a plus {args.extras} isolated (n={n})")
        print(f"k = f(b)/f(2a) = {rep.k:.6g}   m = f(a+b)/f(2a) = {rep.m:.6g}")
        for key, h in rep.hypotheses.items():
            print(f"  ({key}) {h['desc']:<22} value={h['value']:.6g}  {'holds' if h['holds'] else 'FAILS'}")
        for name, vals in rep.subforests.items():
            xs = "  ".join(f"{k}={vals[k]:.6f}" for k in ("x1", "x2", "x3", "x4"))
            print(f"  {name:<3} {xs}  nonroot={vals['nonroot_mass']:.6f}")
        print(f"non-root mass on the full forest = {rep.nonroot_mass:.9f}  (asymptotic target {rep.lemma_bound:.6f})")
        if verdict_ok is None:
            print("hypotheses unmet: no verdict")
        else:
            print("over-distributes: no exact extension exists" if verdict_ok else "does not over-distribute")
    if verdict_ok is None:
        return EXIT_OK
    return EXIT_OK if verdict_ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="progeny", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a mechanism on a forest file")
    p.add_argument("mechanism")
    p.add_argument("forest", help="forest file, or - for stdin")
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=_eval)

    p = sub.add_parser("audit", help="exhaustive property audit")
    p.add_argument("mechanism")
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--checks", default="ic")
    p.add_argument("--bound", type=float, default=None)
    p.add_argument("--mass-mode", choices=("exact", "subdistribution"), default=None)
    p.add_argument("--forest", action="append", help="audit only these forest files")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=_audit)

    p = sub.add_parser("enumerate", help="list every labeled forest on n vertices")
    p.add_argument("n", type=int)
    p.add_argument("--unlabeled", action="store_true")
    p.add_argument("--count", action="store_true")
    p.set_defaults(func=_enumerate)

    p = sub.add_parser("family", help="build a star-based forest")
    p.add_argument("spec", help="star:k | star-path:s1,s2,... | overpay:a,b | upper-pair:n")
    p.add_argument("--extras", type=int, default=0)
    p.add_argument("--connected", action="store_true")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_family)

    p = sub.add_parser("examples", help="reproduce the worked example values")
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=_examples)

    p = sub.add_parser("demo", help="upper-bound or impossibility demonstration")
    p.add_argument("kind", choices=("upper-bound", "impossibility"))
    p.add_argument("--mechanism", default="mf")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--generator", default="pow2", help="pow2 | square | linear | const | path to JSON table")
    p.add_argument("--a", type=int, default=10)
    p.add_argument("--b", type=int, default=20)
    p.add_argument("--extras", type=int, default=2)
    p.add_argument("--slack", type=float, default=1e-2)
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=_demo)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (NumericalOverflow, DegenerateInterval, OverflowError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ForestError, InvalidSpec, MechanismError, CapExceeded, argparse.ArgumentTypeError,
            OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
