"""
Forests, progeny and the candidate path
=======================================

A forest is a parent array: ``parent[v]`` is the vertex ``v`` points at, or
``None`` for a root. Everything else (progeny, root order, the vertices that
would become the top root after cutting their own edge) is derived from it.
"""

from progeny import Forest, candidate_set, enumerate_forests, new_forest, remove_out_edge
from progeny.enumeration import canonical_code
from progeny.families import tail_path_example

# a small forest: 0 -> 1 -> 3, 2 -> 3, and 4 on its own
f = new_forest(5, [1, 3, 3, None, None])
t = f.table
print("parents     ", f.parent)
print("progeny     ", t.p)
print("roots by size", t.roots_ordered, " P* =", t.pstar)

# cutting the out-edge of 1 splits the tree
g = remove_out_edge(f, 1)
print("without 1->3", g.parent, "roots", g.table.roots_ordered)

# the candidate path is always a directed path ending at the top root
f, names = tail_path_example()
label = {v: k for k, v in names.items()}
print("candidate path:", [label[v] for v in candidate_set(f)])

# every labeled forest on n vertices, and the unlabeled shapes
for n in range(1, 6):
    labeled = sum(1 for _ in enumerate_forests(n))
    shapes = sum(1 for _ in enumerate_forests(n, unlabeled=True))
    print(f"n={n}: {labeled:>5} labeled forests, {shapes:>3} shapes")

# automorphism orbits from canonical subtree codes
two = Forest.empty(2)
print("orbits of two isolated vertices:", canonical_code(two).orbits)
