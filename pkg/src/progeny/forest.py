"""Directed forests stored as parent maps, plus progeny and candidate-path machinery."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "ForestError",
    "CycleDetected",
    "IndexOutOfRange",
    "Forest",
    "ProgenyTable",
    "new_forest",
    "progeny_table",
    "remove_out_edge",
    "candidate_set",
    "candidate_set_bruteforce",
    "precedes",
]


class ForestError(ValueError):
    """Base class for malformed forests."""


class CycleDetected(ForestError):
    pass


class IndexOutOfRange(ForestError):
    pass


@dataclass(frozen=True)
class Forest:
    """An immutable labeled directed forest on vertices ``0..n-1``.

    ``parent[v]`` is the head of the unique out-edge of ``v`` or ``None`` when
    ``v`` is a root. Construct through :func:`new_forest` (or
    ``Forest.from_parents``) to get validation.
    """

    parent: tuple[Optional[int], ...]

    @classmethod
    def from_parents(cls, parent: Sequence[Optional[int]]) -> "Forest":
        return new_forest(len(parent), parent)

    @classmethod
    def empty(cls, n: int) -> "Forest":
        return cls((None,) * n)

    @property
    def n(self) -> int:
        return len(self.parent)

    def __len__(self) -> int:
        return len(self.parent)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in range(self.n)]
        for v, p in enumerate(self.parent):
            if p is not None:
                kids[p].append(v)
        return tuple(tuple(c) for c in kids)

    @cached_property
    def roots(self) -> tuple[int, ...]:
        return tuple(v for v, p in enumerate(self.parent) if p is None)

    @property
    def n_edges(self) -> int:
        return self.n - len(self.roots)

    def is_root(self, v: int) -> bool:
        return self.parent[v] is None

    def edges(self) -> list[tuple[int, int]]:
        return [(v, p) for v, p in enumerate(self.parent) if p is not None]

    @cached_property
    def table(self) -> "ProgenyTable":
        return progeny_table(self)

    def without_edge(self, x: int) -> "Forest":
        return remove_out_edge(self, x)

    def root_of(self, v: int) -> int:
        while self.parent[v] is not None:
            v = self.parent[v]
        return v

    def relabel(self, perm: Sequence[int]) -> "Forest":
        """Image of the forest under the vertex map ``v -> perm[v]``."""
        parent: list[Optional[int]] = [None] * self.n
        for v, p in enumerate(self.parent):
            parent[perm[v]] = None if p is None else perm[p]
        return Forest(tuple(parent))

    def __repr__(self) -> str:
        return f"Forest({list(self.parent)})"


def new_forest(n: int, parent: Sequence[Optional[int]] | dict) -> Forest:
    """Validate a parent map and return a :class:`Forest`.

    ``parent`` may be a sequence of length ``n`` or a dict (missing keys are
    roots). Raises :class:`IndexOutOfRange` or :class:`CycleDetected`.
    """
    if n < 0:
        raise IndexOutOfRange(f"vertex count must be non-negative, got {n}")
    if isinstance(parent, dict):
        for k in parent:
            if not (isinstance(k, (int, np.integer)) and 0 <= k < n):
                raise IndexOutOfRange(f"vertex {k!r} outside 0..{n - 1}")
        seq = [parent.get(v) for v in range(n)]
    else:
        seq = list(parent)
        if len(seq) != n:
            raise IndexOutOfRange(f"parent map has {len(seq)} entries, expected {n}")

    clean: list[Optional[int]] = []
    for v, p in enumerate(seq):
        if p is None:
            clean.append(None)
            continue
        if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
            raise IndexOutOfRange(f"parent of {v} is not a vertex id: {p!r}")
        p = int(p)
        if not 0 <= p < n:
            raise IndexOutOfRange(f"parent of {v} is {p}, outside 0..{n - 1}")
        if p == v:
            raise CycleDetected(f"self loop at {v}")
        clean.append(p)

    # colour: 0 unseen, 1 on current walk, 2 known to reach a root
    state = [0] * n
    for start in range(n):
        walk = []
        v: Optional[int] = start
        while v is not None and state[v] == 0:
            state[v] = 1
            walk.append(v)
            v = clean[v]
        if v is not None and state[v] == 1:
            raise CycleDetected(f"parent chain from {start} revisits {v}")
        for w in walk:
            state[w] = 2
    return Forest(tuple(clean))


def precedes(p_x: float, x: int, p_y: float, y: int) -> bool:
    """True when ``x`` comes strictly before ``y``: larger progeny, ties to the smaller id."""
    return p_x > p_y or (p_x == p_y and x < y)


@dataclass(frozen=True)
class ProgenyTable:
    """Progenies of every vertex and the roots in decreasing order."""

    p: tuple[int, ...]
    pstar: int
    roots_ordered: tuple[int, ...]
    below: tuple[int, ...]  # largest progeny strictly inside T(v), 0 for a leaf

    def root_rank(self, v: int) -> int:
        return self.roots_ordered.index(v)

    @property
    def r1(self) -> int:
        return self.roots_ordered[0]

    @property
    def second_progeny(self) -> int:
        """P(r_2), or 0 when the forest has a single tree."""
        return self.p[self.roots_ordered[1]] if len(self.roots_ordered) > 1 else 0


def _postorder(forest: Forest) -> list[int]:
    order: list[int] = []
    kids = forest.children
    for r in forest.roots:
        stack = [r]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(kids[v])
    order.reverse()
    return order


def progeny_table(forest: Forest) -> ProgenyTable:
    n = forest.n
    if n == 0:
        raise ForestError("progeny table needs at least one vertex")
    p = [1] * n
    below = [0] * n
    for v in _postorder(forest):
        par = forest.parent[v]
        if par is not None:
            p[par] += p[v]
            if p[v] > below[par]:
                below[par] = p[v]
    roots = sorted(forest.roots, key=lambda r: (-p[r], r))
    return ProgenyTable(tuple(p), p[roots[0]], tuple(roots), tuple(below))


def remove_out_edge(forest: Forest, x: int) -> Forest:
    if not 0 <= x < forest.n:
        raise IndexOutOfRange(f"vertex {x} outside 0..{forest.n - 1}")
    if forest.parent[x] is None:
        return forest
    parent = list(forest.parent)
    parent[x] = None
    return Forest(tuple(parent))


def candidate_set(forest: Forest) -> list[int]:
    """Vertices that become the top root once their own out-edge is cut.

    Returned as the directed path ``a_1, ..., a_k`` ordered by increasing
    progeny, so ``a_k`` is the top root ``r_1``. Uses the progeny-threshold
    characterisation: ``x`` lies in the top tree and beats both half of
    ``P(r_1)`` (ties against ``r_1``'s id) and ``r_2`` (ties against its id).
    """
    t = forest.table
    r1 = t.r1
    half = t.pstar / 2
    r2 = t.roots_ordered[1] if len(t.roots_ordered) > 1 else None
    out = []
    stack = [r1]
    kids = forest.children
    while stack:
        v = stack.pop()
        pv = t.p[v]
        if not precedes(pv, v, half, r1):
            continue
        if r2 is not None and not precedes(pv, v, t.p[r2], r2):
            continue
        out.append(v)
        stack.extend(kids[v])
    out.sort(key=lambda v: t.p[v])
    return out


def candidate_set_bruteforce(forest: Forest) -> list[int]:
    """Definitional version: every ``x`` with ``x == r_1(F_x)``."""
    out = [x for x in range(forest.n) if remove_out_edge(forest, x).table.r1 == x]
    t = forest.table
    out.sort(key=lambda v: t.p[v])
    return out


def subtree(forest: Forest, x: int) -> list[int]:
    out = []
    stack = [x]
    while stack:
        v = stack.pop()
        out.append(v)
        stack.extend(forest.children[v])
    return out


def ancestors(forest: Forest, x: int) -> Iterable[int]:
    v = forest.parent[x]
    while v is not None:
        yield v
        v = forest.parent[v]
