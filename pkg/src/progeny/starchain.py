"""Exact function-generated evaluation on forests made of star chains.

A star chain is a path of star centres, each pointing at the next. Cutting
edges of such a forest only ever produces isolated vertices, shorter leaf
counts and split chains, so every forest reached by the IC recursion is
described by a leaf count per star plus the set of surviving centre-to-centre
edges. The non-root mass is filled in over that state space by sweeping the
total leaf count upwards; within one sweep, edge subsets are visited by size.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .forest import Forest

__all__ = ["StarLayout", "decompose", "StarChainSolver", "evaluate_star_chains"]


@dataclass(frozen=True)
class StarLayout:
    """Stars in chain order; ``links[j] = i`` means centre ``i`` points at centre ``i + 1``."""

    n: int
    sizes: tuple[int, ...]
    centres: tuple[int, ...]
    leaves: tuple[tuple[int, ...], ...]
    links: tuple[int, ...]
    extras: tuple[int, ...]


def decompose(forest: Forest) -> Optional[StarLayout]:
    """Split a forest into star chains and isolated vertices, or return None.

    A tree qualifies when every vertex has at most one child that itself has
    children; the vertices with children then form the chain of centres.
    """
    kids = forest.children
    sizes, centres, leaves, links, extras = [], [], [], [], []
    for r in forest.roots:
        if not kids[r]:
            extras.append(r)
            continue
        spine = [r]
        v = r
        while True:
            inner = [c for c in kids[v] if kids[c]]
            if len(inner) > 1:
                return None
            if not inner:
                break
            v = inner[0]
            spine.append(v)
        spine.reverse()
        first = len(centres)
        for i, c in enumerate(spine):
            own = tuple(x for x in kids[c] if not kids[x])
            centres.append(c)
            leaves.append(own)
            sizes.append(1 + len(own))
            if i + 1 < len(spine):
                links.append(first + i)
    return StarLayout(forest.n, tuple(sizes), tuple(centres), tuple(leaves), tuple(links), tuple(extras))


class StarChainSolver:
    """Dynamic program over (leaf counts, surviving links) for one generator table."""

    def __init__(self, weights: np.ndarray, sizes: Sequence[int], links: Sequence[int], extras: int):
        self.f = np.asarray(weights, dtype=float)
        self.sizes = tuple(int(s) for s in sizes)
        self.links = tuple(int(j) for j in links)
        self.extras = int(extras)
        self.m = len(self.sizes)
        n = sum(self.sizes) + self.extras
        if len(self.f) < n + 1:
            raise ValueError(f"generator table covers progeny up to {len(self.f) - 1}, need {n}")
        self.shape = tuple(self.sizes)
        n_masks = 1 << len(self.links)
        self.nonroot = np.zeros((n_masks,) + self.shape)
        self._segments = [self._segments_for(mask) for mask in range(n_masks)]
        self._solve()

    # -- structure -------------------------------------------------------
    def _segments_for(self, mask: int) -> list[list[int]]:
        joined = {self.links[j] for j in range(len(self.links)) if mask >> j & 1}
        segs, cur = [], [0] if self.m else []
        for i in range(1, self.m):
            if i - 1 in joined:
                cur.append(i)
            else:
                segs.append(cur)
                cur = [i]
        if cur:
            segs.append(cur)
        return segs

    def _terms(self, mask: int, l: np.ndarray):
        """Per-state pieces shared by the sweep and the point queries.

        ``l`` has shape (m, k). Returns the root weight sum, and for every star
        its segment root progeny, and for every centre the progeny of the
        chain prefix ending at it.
        """
        f = self.f
        size = 1 + l
        iso = self.extras + (np.array(self.sizes)[:, None] - 1 - l).sum(0)
        weight = iso * f[1]
        seg_total = np.empty_like(size)
        prefix = np.empty_like(size)
        for seg in self._segments[mask]:
            run = np.cumsum(size[seg], axis=0)
            prefix[seg] = run
            seg_total[seg] = run[-1]
            weight = weight + f[run[-1]]
        return weight, seg_total, prefix

    def _leaf_value(self, mask, l, i, weight, seg_total, prev):
        f = self.f
        pr = seg_total[i]
        w = weight - f[pr] + f[pr - 1] + f[1]
        return f[1] / w * (1.0 - prev)

    def _link_value(self, mask, l, j, weight, seg_total, prefix, prev):
        f = self.f
        i = self.links[j]
        pc = prefix[i]
        pr = seg_total[i]
        w = weight - f[pr] + f[pc] + f[pr - pc]
        return f[pc] / w * (1.0 - prev)

    # -- sweep -----------------------------------------------------------
    def _solve(self) -> None:
        if not self.m:
            return  # only isolated vertices: nothing is paid to non-roots
        grid = np.indices(self.shape).reshape(self.m, -1)
        diag = grid.sum(0)
        masks = sorted(range(len(self._segments)), key=lambda k: (bin(k).count("1"), k))
        flat = [tab.reshape(-1) for tab in self.nonroot]
        for total in range(int(diag.max()) + 1):
            sel = np.flatnonzero(diag == total)
            l = grid[:, sel]
            for mask in masks:
                weight, seg_total, prefix = self._terms(mask, l)
                acc = np.zeros(l.shape[1])
                for i in range(self.m):
                    has = l[i] > 0
                    if not has.any():
                        continue
                    lower = l[:, has].copy()
                    lower[i] -= 1
                    prev = flat[mask][np.ravel_multi_index(lower, self.shape)]
                    val = self._leaf_value(mask, l[:, has], i, weight[has], seg_total[:, has], prev)
                    acc[has] += l[i, has] * val
                for j in range(len(self.links)):
                    if not mask >> j & 1:
                        continue
                    prev = flat[mask & ~(1 << j)][sel]
                    acc += self._link_value(mask, l, j, weight, seg_total, prefix, prev)
                flat[mask][sel] = acc

    # -- queries ---------------------------------------------------------
    def state(self, mask: int, leaves: Optional[Sequence[int]] = None) -> dict:
        """Values at one state (default: all leaves present).

        Returns ``leaf[i]`` (each leaf of star ``i``), ``link[j]`` (the centre
        whose out-edge is link ``j``, if present), ``root[i]`` (centre ``i`` if
        it heads its segment), ``isolated`` (each isolated vertex) and
        ``nonroot_mass``.
        """
        if leaves is None:
            leaves = [s - 1 for s in self.sizes]
        l = np.array(leaves, dtype=int)[:, None]
        weight, seg_total, prefix = self._terms(mask, l)
        nonroot = float(self.nonroot[mask][tuple(leaves)])
        resid = 1.0 - nonroot
        out = {"leaf": {}, "link": {}, "root": {}, "nonroot_mass": nonroot}
        for i in range(self.m):
            if leaves[i] > 0:
                lower = list(leaves)
                lower[i] -= 1
                prev = self.nonroot[mask][tuple(lower)]
                out["leaf"][i] = float(self._leaf_value(mask, l, i, weight, seg_total, prev)[0])
        for j in range(len(self.links)):
            if mask >> j & 1:
                prev = self.nonroot[mask & ~(1 << j)][tuple(leaves)]
                out["link"][j] = float(self._link_value(mask, l, j, weight, seg_total, prefix, prev)[0])
        for seg in self._segments[mask]:
            top = seg[-1]
            out["root"][top] = float(self.f[seg_total[top, 0]] / weight[0] * resid)
        out["isolated"] = float(self.f[1] / weight[0] * resid)
        return out


def evaluate_star_chains(table, layout: StarLayout):
    """Full per-vertex distribution of a function-generated mechanism on ``layout``."""
    from .mechanisms import Distribution

    solver = StarChainSolver(table.array(), layout.sizes, layout.links, len(layout.extras))
    full = (1 << len(layout.links)) - 1
    st = solver.state(full)
    probs = np.zeros(layout.n)
    for i, own in enumerate(layout.leaves):
        for leaf in own:
            probs[leaf] = st["leaf"][i]
    for j, i in enumerate(layout.links):
        probs[layout.centres[i]] = st["link"][j]
    for i, val in st["root"].items():
        probs[layout.centres[i]] = val
    for v in layout.extras:
        probs[v] = st["isolated"]
    return Distribution(probs, st["nonroot_mass"])
