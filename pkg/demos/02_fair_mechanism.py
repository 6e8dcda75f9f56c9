"""
The fair mechanism
==================

Only the top root is ever paid directly. A vertex off the root gets what it
would get as a root of ``F_x``, its own forest with its out-edge removed, so
changing where it points cannot change its chance. The result is supported on
the candidate path and never sums above one.
"""

import math

import numpy as np

from progeny import FairMechanism, fair_closed_form
from progeny.families import descending_chain_example, tail_path_example
from progeny.verify import quality

mech = FairMechanism()

for build in (tail_path_example, descending_chain_example):
    f, names = build()
    d = mech.evaluate(f)
    print(build.__name__)
    for name, v in names.items():
        if d[v] > 0:
            print(f"  {name:<4} P={f.table.p[v]:>2}  prob={d[v]:.6f}")
    print(f"  total={d.total:.6f}  unselected={d.no_selection:.6f}  quality={quality(mech, f).q:.6f}")

# the same numbers from the path formula, without any recursion
f, _ = descending_chain_example()
print("closed form agrees:", np.allclose(mech.evaluate(f).probs, fair_closed_form(f).probs, atol=1e-12))
print("half log2(2.5) =", 0.5 * math.log2(2.5))
