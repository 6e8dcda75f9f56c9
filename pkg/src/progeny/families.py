"""Builders for star-based forest families and the worked example forests.

Labeling convention for every builder here: star centres first, chain by
chain and in chain order (each centre points at the next one in its chain),
then the leaves star by star, then isolated extras.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .forest import Forest, new_forest

__all__ = [
    "InvalidSpec",
    "ForestFamilySpec",
    "StarChains",
    "star_chains",
    "build_family",
    "parse_family",
    "tail_path_example",
    "descending_chain_example",
    "three_trees_example",
]


class InvalidSpec(ValueError):
    pass


@dataclass(frozen=True)
class StarChains:
    """A forest built from chains of stars, with its vertex layout."""

    forest: Forest
    chains: tuple[tuple[int, ...], ...]  # star sizes per chain, in chain order
    extras: int
    centres: tuple[tuple[int, ...], ...]  # centre ids, same shape as ``chains``
    leaves: tuple[tuple[tuple[int, ...], ...], ...]


def star_chains(chains: Sequence[Sequence[int]], extras: int = 0) -> StarChains:
    chains = tuple(tuple(int(s) for s in c) for c in chains)
    if extras < 0:
        raise InvalidSpec("extras must be non-negative")
    if any(len(c) == 0 for c in chains):
        raise InvalidSpec("empty chain")
    if any(s < 1 for c in chains for s in c):
        raise InvalidSpec("star sizes must be at least 1")

    n = sum(sum(c) for c in chains) + extras
    parent: list[Optional[int]] = [None] * n
    centres = []
    nxt = 0
    for c in chains:
        ids = tuple(range(nxt, nxt + len(c)))
        nxt += len(c)
        for a, b in zip(ids, ids[1:]):
            parent[a] = b
        centres.append(ids)
    leaves = []
    for c, ids in zip(chains, centres):
        per_chain = []
        for size, centre in zip(c, ids):
            mine = tuple(range(nxt, nxt + size - 1))
            nxt += size - 1
            for leaf in mine:
                parent[leaf] = centre
            per_chain.append(mine)
        leaves.append(tuple(per_chain))
    return StarChains(new_forest(n, parent), chains, extras, tuple(centres), tuple(leaves))


@dataclass(frozen=True)
class ForestFamilySpec:
    """``kind`` is one of ``star``, ``star-path``, ``overpay``, ``upper-pair``.

    * ``star``: ``sizes=(k,)``
    * ``star-path``: ``sizes`` in chain order
    * ``overpay``: ``sizes=(a, b)``, built as the chain ``b, b, a, a``
    * ``upper-pair``: ``sizes=(n,)``, two ``n/2``-stars, centre-to-centre edge if ``connected``
    """

    kind: str
    sizes: tuple[int, ...] = field(default_factory=tuple)
    extras: int = 0
    connected: bool = False

    def validate(self) -> None:
        if self.extras < 0:
            raise InvalidSpec("extras must be non-negative")
        if self.kind == "star":
            if len(self.sizes) != 1 or self.sizes[0] < 1:
                raise InvalidSpec("star needs one size >= 1")
        elif self.kind == "star-path":
            if not self.sizes or min(self.sizes) < 1:
                raise InvalidSpec("star-path sizes must be >= 1")
        elif self.kind == "overpay":
            if len(self.sizes) != 2:
                raise InvalidSpec("overpay needs (a, b)")
            a, b = self.sizes
            if not (a >= 1 and b >= 2 * a):
                raise InvalidSpec(f"overpay needs b >= 2a >= 2, got a={a}, b={b}")
        elif self.kind == "upper-pair":
            if len(self.sizes) != 1 or self.sizes[0] < 2 or self.sizes[0] % 2:
                raise InvalidSpec("upper-pair needs an even n >= 2")
        else:
            raise InvalidSpec(f"unknown family kind {self.kind!r}")

    def layout(self) -> StarChains:
        self.validate()
        if self.kind == "star":
            return star_chains([self.sizes], self.extras)
        if self.kind == "star-path":
            return star_chains([self.sizes], self.extras)
        if self.kind == "overpay":
            a, b = self.sizes
            return star_chains([(b, b, a, a)], self.extras)
        half = self.sizes[0] // 2
        if self.connected:
            return star_chains([(half, half)], self.extras)
        return star_chains([(half,), (half,)], self.extras)


def build_family(spec: ForestFamilySpec) -> Forest:
    return spec.layout().forest


def parse_family(text: str, extras: int = 0, connected: bool = False) -> ForestFamilySpec:
    """Parse ``star:k``, ``star-path:s1,s2,...``, ``overpay:a,b`` or ``upper-pair:n``."""
    kind, _, args = text.partition(":")
    kind = kind.strip()
    if kind == "upper":
        kind = "upper-pair"
    try:
        sizes = tuple(int(s) for s in args.split(",") if s.strip())
    except ValueError as exc:
        raise InvalidSpec(f"bad sizes in {text!r}") from exc
    spec = ForestFamilySpec(kind, sizes, extras, connected)
    spec.validate()
    return spec


# Worked examples. Each returns the forest and a name -> vertex id map.

def tail_path_example() -> tuple[Forest, dict[str, int]]:
    """A 4-star into a 2-star into a bare 4-vertex path (10 vertices), beside a 5-star."""
    sc = star_chains([(4, 2, 1, 1, 1, 1), (5,)])
    a, b, c1, c2, c3, c4 = sc.centres[0]
    (d,) = sc.centres[1]
    names = dict(a=a, b=b, c_1=c1, c_2=c2, c_3=c3, c_4=c4, d=d)
    return sc.forest, names


def descending_chain_example() -> tuple[Forest, dict[str, int]]:
    """Chain 4-star -> 3-star -> 2-star -> single vertex; progenies 4, 7, 9, 10."""
    sc = star_chains([(4, 3, 2, 1)])
    a, b, c, d = sc.centres[0]
    return sc.forest, dict(a=a, b=b, c=c, d=d)


def three_trees_example() -> tuple[Forest, dict[str, int]]:
    """Three trees of orders 10, 9 and 8 (27 vertices).

    Top tree: 2-star a_0 -> 4-star a_1 -> 2-star a_2 -> 2-star a_3.
    Second: single vertex -> 3-star -> 3-star b_1 -> 2-star b_2.
    Third: an 8-star c_1.
    """
    sc = star_chains([(2, 4, 2, 2), (1, 3, 3, 2), (8,)])
    a0, a1, a2, a3 = sc.centres[0]
    b_lone, b_mid, b1, b2 = sc.centres[1]
    (c1,) = sc.centres[2]
    names = dict(a_0=a0, a_1=a1, a_2=a2, a_3=a3, b_0=b_lone, b_mid=b_mid, b_1=b1, b_2=b2, c_1=c1)
    return sc.forest, names
