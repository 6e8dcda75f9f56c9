"""
An exact mechanism
==================

Roots other than the top one share the stretch of progeny above ``P*/2`` that
their tree covers; on each piece the integrand is ``1/(z u(z))`` where ``u``
counts the roots tall enough to reach ``z``. The top root takes the rest, so the
total is exactly one. The interval rule applied to every vertex directly gives
the same kind of split but is not IC.
"""

from progeny import ExactMechanism, IntervalShare
from progeny.families import three_trees_example
from progeny.intervals import piecewise_integral
from progeny.verify import audit_ic

f, names = three_trees_example()
exact = ExactMechanism().evaluate(f)
share = IntervalShare().evaluate(f)

print(f"{'vertex':<6} {'P':>3} {'exact':>10} {'interval':>10}")
for name, v in names.items():
    if exact[v] or share[v]:
        print(f"{name:<6} {f.table.p[v]:>3} {exact[v]:>10.6f} {share[v]:>10.6f}")
print(f"{'total':<10} {exact.total:>10.6f} {share.total:>10.6f}")

# one root's share, piece by piece: between 5 and 8 three roots split it
progs = [10, 9, 8]
print("integral 5..8 with u=3:", piecewise_integral(5, 8, progs))

# the interval rule pays a_1 differently once it cuts its edge
rep = audit_ic(IntervalShare(), forests=[f])
print("interval rule IC violations on this forest:", rep.n_violations)
for w in rep.violations[:3]:
    print("  ", w.where, "in F:", round(w.observed, 6), "alone:", round(w.bound, 6))
