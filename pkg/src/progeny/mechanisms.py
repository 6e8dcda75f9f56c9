"""Selection mechanisms on forests.

Every IC mechanism here is specified by what it pays the roots of a forest;
a non-root ``x`` is then paid what it would get as a root of ``F_x`` (the
forest with ``x``'s out-edge removed). :meth:`Mechanism.evaluate` performs
that extension, memoized on the parent map.
"""

from __future__ import annotations

import itertools
import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .families import star_chains
from .forest import Forest, candidate_set, remove_out_edge
from .intervals import piecewise_integral

__all__ = [
    "MechanismError",
    "NumericalOverflow",
    "ZeroDenominator",
    "Distribution",
    "GeneratorTable",
    "Mechanism",
    "FairMechanism",
    "SmoothedFairMechanism",
    "ExactMechanism",
    "IntervalShare",
    "FunctionGenerated",
    "Uniform",
    "Empty",
    "Symmetrized",
    "evaluate",
    "fair_closed_form",
    "interval_share",
    "function_generated",
    "extract_generator",
    "symmetrize",
    "uniform",
    "empty",
    "parse_mechanism",
]

TOL = 1e-9


class MechanismError(ValueError):
    pass


class NumericalOverflow(MechanismError, ArithmeticError):
    pass


class ZeroDenominator(MechanismError, ZeroDivisionError):
    pass


def _fmt(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise NumericalOverflow(f"cannot serialize non-finite value {x}")
    return format(float(x), ".17g")


@dataclass(frozen=True)
class Distribution:
    """Per-vertex selection probabilities for one forest."""

    probs: np.ndarray
    nonroot_mass: float = 0.0

    @property
    def total(self) -> float:
        return float(self.probs.sum())

    @property
    def valid(self) -> bool:
        return bool((self.probs >= -TOL).all() and self.total <= 1 + TOL)

    @property
    def no_selection(self) -> float:
        return 1.0 - self.total

    def __getitem__(self, v: int) -> float:
        return float(self.probs[v])

    def __len__(self) -> int:
        return len(self.probs)

    def support(self, tol: float = 1e-12) -> list[int]:
        return [int(v) for v in np.flatnonzero(np.abs(self.probs) > tol)]

    def to_json(self) -> str:
        probs = ", ".join(_fmt(p) for p in self.probs)
        return (
            f'{{"probs": [{probs}], "total": {_fmt(self.total)}, '
            f'"valid": {"true" if self.valid else "false"}}}'
        )


@dataclass(frozen=True)
class GeneratorTable:
    """Positive weights ``f(1), ..., f(N)`` indexed by progeny."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise MechanismError("generator table is empty")
        if not all(v > 0 and math.isfinite(v) for v in vals):
            raise MechanismError("generator values must be positive and finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, fn: Callable[[int], float], n: int) -> "GeneratorTable":
        return cls(tuple(fn(k) for k in range(1, n + 1)))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "GeneratorTable":
        """Read a JSON list ``[f(1), f(2), ...]`` or an object ``{"f": [...]}``."""
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        if isinstance(obj, dict):
            obj = obj.get("f")
        if not isinstance(obj, list):
            raise MechanismError("generator file must hold a list of weights")
        return cls(tuple(obj))

    @property
    def size(self) -> int:
        return len(self.values)

    def __call__(self, k: int) -> float:
        if not 1 <= k <= len(self.values):
            raise MechanismError(f"generator undefined at progeny {k} (table covers 1..{len(self.values)})")
        return self.values[k - 1]

    def array(self) -> np.ndarray:
        """Weights as an array indexed directly by progeny (slot 0 unused)."""
        return np.array((np.nan,) + self.values)

    def is_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.values, self.values[1:]))


class Mechanism(ABC):
    """A selection mechanism given by its payment to roots.

    Subclasses implement :meth:`root_value`; ``nonroot_mass`` is a thunk that
    returns the total paid to non-roots of the same forest, for rules (exact
    or function-generated) that hand out a residual.
    """

    spec: str = "?"
    ic = True

    def __init__(self):
        self._cache: dict[tuple, Distribution] = {}

    def clear_cache(self) -> None:
        self._cache.clear()

    @abstractmethod
    def root_value(self, forest: Forest, x: int, nonroot_mass: Callable[[], float]) -> float:
        ...

    def root_probs(self, forest: Forest) -> dict[int, float]:
        thunk = self._nonroot_thunk(forest)
        return {r: self.root_value(forest, r, thunk) for r in forest.roots}

    def _nonroot_thunk(self, forest: Forest) -> Callable[[], float]:
        return lambda: self.evaluate(forest).nonroot_mass

    def evaluate(self, forest: Forest) -> Distribution:
        key = forest.parent
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        probs = np.zeros(forest.n)
        for x, p in enumerate(forest.parent):
            if p is not None:
                fx = remove_out_edge(forest, x)
                probs[x] = self.root_value(fx, x, self._nonroot_thunk(fx))
        nonroot = float(probs.sum())
        for r in forest.roots:
            probs[r] = self.root_value(forest, r, lambda: nonroot)
        dist = Distribution(probs, nonroot)
        self._cache[key] = dist
        return dist

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec}>"


def _fair_top_value(forest: Forest) -> float:
    """What the fair rule pays the top root: 1/2, or half the log-ratio to the next candidate."""
    t = forest.table
    if len(candidate_set(forest)) == 1:
        return 0.5
    return 0.5 * math.log2(t.pstar / t.below[t.r1])


class FairMechanism(Mechanism):
    """Only the top root is paid: 1/2 if it is the sole candidate, else
    ``0.5 * log2(P(r_1) / P_below(r_1))``. Support equals the candidate path."""

    spec = "mf"

    def root_value(self, forest, x, nonroot_mass):
        if x != forest.table.r1:
            return 0.0
        return _fair_top_value(forest)


class SmoothedFairMechanism(Mechanism):
    """Every root ``r`` gets ``top * eps ** (P* - P(r))``; tends to the fair rule as ``eps -> 0``."""

    def __init__(self, eps: float):
        if not 0 < eps < 1:
            raise MechanismError(f"eps must lie in (0, 1), got {eps}")
        super().__init__()
        self.eps = float(eps)
        self.spec = f"meps:{eps:g}"

    def root_value(self, forest, x, nonroot_mass):
        t = forest.table
        top = _fair_top_value(forest)
        gap = t.pstar - t.p[x]
        val = top * self.eps**gap
        if val == 0.0 and top > 0:
            raise NumericalOverflow(f"eps={self.eps} ** {gap} underflows")
        return val


class ExactMechanism(Mechanism):
    """Roots after the first share the interval above half the top progeny;
    the top root takes whatever is left so the total is exactly one."""

    spec = "mb"

    def root_value(self, forest, x, nonroot_mass):
        t = forest.table
        if x == t.r1:
            others = sum(self._interval_value(forest, r) for r in t.roots_ordered[1:])
            return 1.0 - nonroot_mass() - others
        return self._interval_value(forest, x)

    @staticmethod
    def _interval_value(forest: Forest, r: int) -> float:
        t = forest.table
        half = t.pstar / 2
        if t.p[r] <= half:
            return 0.0
        lo = max(t.below[r], half)
        return piecewise_integral(lo, t.p[r], (t.p[q] for q in t.roots_ordered))


class FunctionGenerated(Mechanism):
    """Roots split the residual ``1 - (non-root mass)`` in proportion to ``f(P(r))``.

    Root shares go negative when the non-root mass exceeds one; they are
    reported, not clamped. Forests made of star chains with many edges are
    evaluated by the exact dynamic program in :mod:`progeny.starchain`.
    """

    symmetric = True
    dp_min_edges = 12

    def __init__(self, table: GeneratorTable, name: Optional[str] = None):
        super().__init__()
        self.table = table
        self.spec = f"fg:{name}" if name else "fg"

    def root_value(self, forest, x, nonroot_mass):
        t = forest.table
        weight = sum(self.table(t.p[r]) for r in forest.roots)
        return self.table(t.p[x]) / weight * (1.0 - nonroot_mass())

    def evaluate(self, forest: Forest) -> Distribution:
        if forest.n_edges >= self.dp_min_edges and forest.parent not in self._cache:
            from .starchain import decompose, evaluate_star_chains

            layout = decompose(forest)
            if layout is not None:
                dist = evaluate_star_chains(self.table, layout)
                self._cache[forest.parent] = dist
                return dist
        return super().evaluate(forest)


class IntervalShare(Mechanism):
    """Exact but not IC: each vertex above half the top progeny owns
    ``(max(P*/2, P_below(x)), P(x)]``, shared with same-height owners in other trees."""

    spec = "mprime"
    ic = False

    def root_value(self, forest, x, nonroot_mass):
        return self.evaluate(forest)[x]

    def evaluate(self, forest: Forest) -> Distribution:
        t = forest.table
        half = t.pstar / 2
        progs = [t.p[r] for r in t.roots_ordered]
        probs = np.zeros(forest.n)
        for x in range(forest.n):
            if t.p[x] > half:
                probs[x] = piecewise_integral(max(half, t.below[x]), t.p[x], progs)
        nonroot = float(sum(probs[x] for x in range(forest.n) if forest.parent[x] is not None))
        return Distribution(probs, nonroot)


class Uniform(Mechanism):
    spec = "uniform"
    symmetric = True

    def root_value(self, forest, x, nonroot_mass):
        return 1.0 / forest.n

    def evaluate(self, forest):
        probs = np.full(forest.n, 1.0 / forest.n)
        return Distribution(probs, forest.n_edges / forest.n)


class Empty(Mechanism):
    spec = "empty"
    symmetric = True

    def root_value(self, forest, x, nonroot_mass):
        return 0.0

    def evaluate(self, forest):
        return Distribution(np.zeros(forest.n), 0.0)


class Symmetrized(Mechanism):
    """Relabel the vertices by a uniformly random permutation, then apply ``inner``.

    The expectation is computed exactly by averaging over all ``n!``
    relabelings, which keeps IC, exactness and quality of the inner rule and
    is constant on automorphism orbits. Practical up to ``n`` around 7.
    """

    max_n = 8

    def __init__(self, inner: Mechanism):
        super().__init__()
        self.inner = inner
        self.spec = f"sym:{inner.spec}"
        self.ic = inner.ic

    def root_value(self, forest, x, nonroot_mass):
        return self.evaluate(forest)[x]

    def evaluate(self, forest: Forest) -> Distribution:
        key = forest.parent
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        n = forest.n
        if n > self.max_n:
            raise MechanismError(f"symmetrization over {n}! relabelings is too expensive (max n={self.max_n})")
        acc = np.zeros(n)
        count = 0
        for perm in itertools.permutations(range(n)):
            image = forest.relabel(perm)
            acc += self.inner.evaluate(image).probs[list(perm)]
            count += 1
        probs = acc / count
        nonroot = float(sum(probs[x] for x in range(n) if forest.parent[x] is not None))
        dist = Distribution(probs, nonroot)
        self._cache[key] = dist
        return dist


# Functional surface -------------------------------------------------------

def evaluate(mechanism: Mechanism, forest: Forest) -> Distribution:
    return mechanism.evaluate(forest)


def fair_closed_form(forest: Forest) -> Distribution:
    """Direct formula for the fair mechanism, without the IC recursion.

    The support is the candidate path ``a_1..a_k``; ``a_i`` (``i >= 2``) gets
    ``0.5 * log2(P(a_i) / P(a_{i-1}))`` and ``a_1`` gets the top-root value of
    ``F_{a_1}``.
    """
    path = candidate_set(forest)
    t = forest.table
    probs = np.zeros(forest.n)
    for prev, cur in zip(path, path[1:]):
        probs[cur] = 0.5 * math.log2(t.p[cur] / t.p[prev])
    first = path[0]
    probs[first] = _fair_top_value(remove_out_edge(forest, first))
    nonroot = float(sum(probs[x] for x in path if forest.parent[x] is not None))
    return Distribution(probs, nonroot)


def interval_share(forest: Forest) -> Distribution:
    return IntervalShare().evaluate(forest)


def function_generated(table: GeneratorTable, forest: Forest) -> Distribution:
    return FunctionGenerated(table).evaluate(forest)


def uniform(forest: Forest) -> Distribution:
    return Uniform().evaluate(forest)


def empty(forest: Forest) -> Distribution:
    return Empty().evaluate(forest)


def symmetrize(mechanism: Mechanism, forest: Forest) -> Distribution:
    return Symmetrized(mechanism).evaluate(forest)


def extract_generator(mechanism: Mechanism, n: int) -> GeneratorTable:
    """Recover ``f(1..n-1)`` from the centre/isolated ratio on star-plus-isolated forests.

    ``S_k`` is a ``k``-star plus ``n - k`` isolated vertices; ``f(k)`` is the
    centre's probability over the first isolated vertex's, with ``f(1) = 1``.
    """
    if n < 2:
        raise MechanismError("extraction needs n >= 2")
    vals = [1.0]
    for k in range(2, n):
        layout = star_chains([(k,)], n - k)
        centre = layout.centres[0][0]
        lone = k  # first isolated vertex under the family labeling
        dist = mechanism.evaluate(layout.forest)
        denom = dist[lone]
        if denom == 0:
            raise ZeroDenominator(f"{mechanism.spec} gives an isolated vertex probability 0 in S_{k} (n={n})")
        vals.append(dist[centre] / denom)
    return GeneratorTable(tuple(vals))


def parse_mechanism(text: str) -> Mechanism:
    """Parse ``mf``, ``mb``, ``meps:<eps>``, ``fg:<path>``, ``mprime``, ``uniform``, ``empty``, ``sym:<inner>``."""
    text = text.strip()
    head, _, arg = text.partition(":")
    if head == "mf" and not arg:
        return FairMechanism()
    if head == "mb" and not arg:
        return ExactMechanism()
    if head == "mprime" and not arg:
        return IntervalShare()
    if head == "uniform" and not arg:
        return Uniform()
    if head == "empty" and not arg:
        return Empty()
    if head == "meps":
        try:
            eps = float(arg)
        except ValueError:
            raise MechanismError(f"bad epsilon in {text!r}") from None
        return SmoothedFairMechanism(eps)
    if head == "fg" and arg:
        return FunctionGenerated(GeneratorTable.load(arg), name=arg)
    if head == "sym" and arg:
        return Symmetrized(parse_mechanism(arg))
    raise MechanismError(f"unknown mechanism spec {text!r}")
