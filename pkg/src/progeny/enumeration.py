"""Exhaustive enumeration of labeled forests and canonical codes / automorphism orbits."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterator, Optional

from .forest import Forest

__all__ = [
    "CapExceeded",
    "DEFAULT_MAX_N",
    "max_n_cap",
    "enumerate_forests",
    "count_forests",
    "CanonicalCode",
    "canonical_code",
]

DEFAULT_MAX_N = 7


class CapExceeded(ValueError):
    pass


def max_n_cap() -> int:
    """Enumeration cap, overridable through ``PROGENY_MAX_N``."""
    raw = os.environ.get("PROGENY_MAX_N")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_MAX_N


def count_forests(n: int) -> int:
    return (n + 1) ** (n - 1) if n >= 1 else 1


def enumerate_forests(n: int, cap: Optional[int] = None, unlabeled: bool = False) -> Iterator[Forest]:
    """Yield every labeled forest on ``n`` vertices exactly once.

    Parents are assigned to vertices ``0, 1, ...`` in turn, root first and then
    increasing ids, rejecting any choice that closes a cycle. With
    ``unlabeled=True`` only the first representative of each isomorphism class
    is yielded.
    """
    cap = max_n_cap() if cap is None else cap
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > cap:
        raise CapExceeded(f"n={n} exceeds enumeration cap {cap} (set PROGENY_MAX_N to raise it)")

    parent: list[Optional[int]] = [None] * n
    choices = [None] + list(range(n))

    def closes_cycle(v: int, p: int) -> bool:
        w: Optional[int] = p
        while w is not None:
            if w == v:
                return True
            # vertices >= v are unassigned and act as roots for now
            w = parent[w] if w < v else None
        return False

    def rec(v: int) -> Iterator[Forest]:
        if v == n:
            yield Forest(tuple(parent))
            return
        for p in choices:
            if p == v or (p is not None and closes_cycle(v, p)):
                continue
            parent[v] = p
            yield from rec(v + 1)
        parent[v] = None

    if not unlabeled:
        yield from rec(0)
        return
    seen = set()
    for f in rec(0):
        code = canonical_code(f).code
        if code not in seen:
            seen.add(code)
            yield f


@dataclass(frozen=True)
class CanonicalCode:
    """Isomorphism-invariant code of a rooted forest plus its vertex orbits.

    ``orbit_of[v]`` is an integer label shared exactly by the vertices that
    some automorphism maps onto each other.
    """

    code: tuple
    orbit_of: tuple[int, ...]

    @property
    def orbits(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for v, o in enumerate(self.orbit_of):
            groups.setdefault(o, []).append(v)
        return sorted(groups.values())


def canonical_code(forest: Forest) -> CanonicalCode:
    """AHU-style encoding: a subtree is the sorted tuple of its children's codes.

    Two vertices share an orbit iff the codes along their paths up to the
    root coincide, because isomorphic sibling subtrees can always be swapped.
    """
    n = forest.n
    kids = forest.children
    shape_id: dict[tuple, int] = {}
    sub = [0] * n

    order: list[int] = []
    for r in forest.roots:
        stack = [r]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(kids[v])
    for v in reversed(order):
        key = tuple(sorted(sub[c] for c in kids[v]))
        sub[v] = shape_id.setdefault(key, len(shape_id))

    # shape ids depend on visit order, so the exported code uses nested tuples
    inv = {i: k for k, i in shape_id.items()}
    nested: dict[int, tuple] = {}

    def expand(i: int) -> tuple:
        if i not in nested:
            nested[i] = tuple(sorted(expand(c) for c in inv[i]))
        return nested[i]

    code = tuple(sorted(expand(sub[r]) for r in forest.roots))

    path_key: list[tuple] = [()] * n
    for v in order:  # parents precede children in this order
        p = forest.parent[v]
        path_key[v] = (sub[v],) if p is None else path_key[p] + (sub[v],)
    labels: dict[tuple, int] = {}
    orbit_of = tuple(labels.setdefault(path_key[v], len(labels)) for v in range(n))
    return CanonicalCode(code, orbit_of)
