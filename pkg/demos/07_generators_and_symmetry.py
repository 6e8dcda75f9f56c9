"""
Generators and symmetrization
=============================

A function-generated mechanism can be read back from its behaviour: on a
``k``-star next to isolated vertices, the centre over an isolated vertex is
``f(k)/f(1)``. Symmetrization averages a mechanism over every relabeling of the
vertices, so vertices that look alike get the same probability.
"""

import numpy as np

from progeny import ExactMechanism, FairMechanism, Forest, FunctionGenerated, GeneratorTable, Symmetrized
from progeny.mechanisms import extract_generator
from progeny.families import star_chains
from progeny.verify import audit_ic

n = 6
table = GeneratorTable.from_function(lambda k: float(k * k), n)
recovered = extract_generator(FunctionGenerated(table), n)
print("f(k) = k^2 recovered as", np.round(recovered.values, 12).tolist())

print("fair on two isolated:", FairMechanism().evaluate(Forest.empty(2)).probs.tolist())
print("symmetrized:         ", Symmetrized(FairMechanism()).evaluate(Forest.empty(2)).probs.tolist())

two_stars = star_chains([(3,), (3,)]).forest
print("fair on two 3-stars:       ", np.round(FairMechanism().evaluate(two_stars).probs, 4).tolist())
print("symmetrized fair:          ", np.round(Symmetrized(FairMechanism()).evaluate(two_stars).probs, 4).tolist())
# the exact rule already pays both centres alike here
print("exact on two 3-stars:      ", np.round(ExactMechanism().evaluate(two_stars).probs, 4).tolist())
print(audit_ic(Symmetrized(FairMechanism()), 4).to_text())
