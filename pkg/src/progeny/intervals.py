"""Exact integrals of ``1 / (z * u(z))`` where ``u`` counts roots of progeny >= z."""

from __future__ import annotations

import math
from typing import Iterable

__all__ = ["DegenerateInterval", "root_count", "piecewise_integral"]


class DegenerateInterval(ValueError):
    """Raised when the integrand is undefined (no root reaches part of the interval)."""


def root_count(z: float, root_progenies: Iterable[int]) -> int:
    return sum(1 for p in root_progenies if p >= z)


def piecewise_integral(lo: float, hi: float, root_progenies: Iterable[int]) -> float:
    """Return ``(1/ln 2) * integral_lo^hi dz / (z u(z))`` in closed form.

    ``u`` is a left-continuous step function that only drops at root
    progenies, so on each piece ``(z_j, z_{j+1}]`` it is constant and the piece
    contributes ``log2(z_{j+1} / z_j) / u_j``.
    """
    if lo <= 0:
        raise DegenerateInterval(f"lower limit must be positive, got {lo}")
    if hi < lo:
        raise DegenerateInterval(f"empty interval ({lo}, {hi}]")
    if hi == lo:
        return 0.0
    progs = sorted(root_progenies)
    cuts = [lo] + [p for p in sorted(set(progs)) if lo < p < hi] + [hi]
    total = 0.0
    for z0, z1 in zip(cuts, cuts[1:]):
        u = root_count(z1, progs)
        if u == 0:
            raise DegenerateInterval(f"no root reaches ({z0}, {z1}]")
        total += math.log2(z1 / z0) / u
    return total
