"""
Over-distribution
=================

A function-generated mechanism hands roots the residual ``1 - (non-root mass)``
in proportion to ``f(P(root))``. IC fixes every non-root value from smaller
forests, so on a chain of stars ``b, b, a, a`` with a fast-growing ``f`` the
non-root mass alone can exceed one. The star-chain dynamic program evaluates
the 62-vertex case exactly in well under a second.
"""

from progeny import GeneratorTable
from progeny.verify import HypothesisUnmet, demo_overdistribution

table = GeneratorTable.from_function(lambda p: 2.0**p, 62)
rep = demo_overdistribution(table, a=10, b=20, extras=2)

print(f"k = {rep.k:g}, m = {rep.m:g}")
for key, h in rep.hypotheses.items():
    print(f"  ({key}) {h['desc']:<22} {h['value']:.4g}  {'ok' if h['holds'] else 'fails'}")
for name, vals in rep.subforests.items():
    print(f"  {name:<3}", "  ".join(f"{k}={v:+.5f}" for k, v in vals.items()))
print("non-root mass on the full forest:", rep.nonroot_mass)

# a constant generator does not meet the growth conditions
try:
    demo_overdistribution(GeneratorTable.from_function(lambda p: 1.0, 62), 10, 20)
except HypothesisUnmet as exc:
    print("constant f:", exc, "-> non-root mass", round(exc.report.nonroot_mass, 6))
