"""
Smoothing the fair mechanism
============================

Paying every root ``top * eps**(P* - P(r))`` gives positive probabilities with
root ratios that depend only on the two progenies. Shrinking ``eps`` moves it
towards the fair mechanism, except where two roots share the top progeny: equal
progeny means equal pay, so the runner-up of a tie never fades.
"""

import numpy as np

from progeny import FairMechanism, Forest, SmoothedFairMechanism, new_forest

fair = FairMechanism()

# a 4-star, a 2-path and a lone vertex: no cut ever produces a tie at the top
f = new_forest(7, [None, 0, 0, 0, 5, None, None])
for eps in (1e-2, 1e-4, 1e-6):
    d = SmoothedFairMechanism(eps).evaluate(f)
    gap = np.max(np.abs(d.probs - fair.evaluate(f).probs))
    print(f"eps={eps:g}  roots={[f'{d[r]:.3g}' for r in f.roots]}  max gap to fair={gap:.3g}")

tie = Forest.empty(3)
for eps in (1e-2, 1e-6):
    d = SmoothedFairMechanism(eps).evaluate(tie)
    print(f"three isolated, eps={eps:g}: {d.probs.tolist()}  total={d.total}")
