"""
Exhaustive audits
=================

Small forests can be checked one by one. Each audit walks every labeled forest
up to ``n_max`` and records violations with a witness forest; quality audits
also keep the forest where the quality is lowest.
"""

import math

from progeny import ExactMechanism, FairMechanism, Uniform
from progeny.verify import audit_fairness, audit_ic, audit_mass, audit_quality

N = 5
for mech in (FairMechanism(), ExactMechanism()):
    print(audit_ic(mech, N).to_text())

print(audit_mass(ExactMechanism(), N, mode="exact").to_text())
print(audit_mass(FairMechanism(), N, mode="subdistribution").to_text())

print(audit_quality(FairMechanism(), N, bound=1 / math.log(16)).to_text())
print(audit_quality(ExactMechanism(), N, bound=1 / 3).to_text())
# picking uniformly is IC but its quality collapses on long paths
print(audit_quality(Uniform(), N, bound=0.5).to_text())

# the exact rule is not fair: ratios between two root sizes move with context
rep = audit_fairness(ExactMechanism(), N)
print(rep.to_text().splitlines()[0])
