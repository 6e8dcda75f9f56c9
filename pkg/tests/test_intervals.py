import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from progeny.intervals import DegenerateInterval, piecewise_integral, root_count


def quadrature(lo, hi, progs, pieces=200_000):
    """Midpoint rule on 1/(ln2 * z * u(z)), independent of the closed form.

    Cells are laid out separately between consecutive jumps of ``u`` so no
    cell straddles a discontinuity.
    """
    cuts = sorted({lo, hi, *(p for p in progs if lo < p < hi)})
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        edges = np.linspace(a, b, pieces + 1)
        mid = (edges[:-1] + edges[1:]) / 2
        u = (np.asarray(progs)[None, :] >= mid[:, None]).sum(1)
        total += float(np.sum((edges[1:] - edges[:-1]) / (mid * u)))
    return total / math.log(2)


def test_shared_low_segment():
    assert piecewise_integral(5, 8, [10, 9, 8]) == pytest.approx(math.log2(8 / 5) / 3, abs=1e-15)


def test_top_segments():
    want = 0.5 * math.log2(9 / 8) + math.log2(10 / 9)
    assert piecewise_integral(8, 10, [10, 9, 8]) == pytest.approx(want, abs=1e-15)


def test_empty_interval():
    assert piecewise_integral(3, 3, [5]) == 0.0


def test_whole_top_half_sums_to_one():
    # each root above 5 integrates up to its own progeny; stacked, they cover (5, 10] exactly u times
    progs = [10, 9, 8, 3]
    owners = sum(piecewise_integral(5, p, progs) for p in progs if p > 5)
    assert owners == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("lo, hi", [(0, 1), (-1, 2), (3, 2)])
def test_bad_limits(lo, hi):
    with pytest.raises(DegenerateInterval):
        piecewise_integral(lo, hi, [5])


def test_no_root_above():
    with pytest.raises(DegenerateInterval):
        piecewise_integral(2, 6, [5, 3])


def test_root_count_left_continuous():
    assert root_count(8, [10, 9, 8]) == 3
    assert root_count(8.0001, [10, 9, 8]) == 2


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.integers(1, 30), min_size=1, max_size=6),
    st.floats(0.5, 1.0),
    st.floats(0.0, 1.0),
)
def test_matches_quadrature(progs, a, b):
    top = max(progs)
    lo = a * top
    hi = lo + b * (top - lo)
    assert piecewise_integral(lo, hi, progs) == pytest.approx(quadrature(lo, hi, progs), abs=1e-9)
