import itertools

import pytest
from hypothesis import given, settings, strategies as st

from progeny.enumeration import CapExceeded, canonical_code, count_forests, enumerate_forests
from progeny.families import star_chains
from progeny.forest import CycleDetected, Forest, new_forest

from conftest import forests


def brute_force_forests(n):
    """Every parent function on n vertices that has no cycle."""
    out = set()
    for parent in itertools.product([None] + list(range(n)), repeat=n):
        try:
            out.add(new_forest(n, parent).parent)
        except CycleDetected:
            continue
    return out


def automorphism_orbits(f: Forest):
    """Orbit partition from all n! permutations that preserve the parent map."""
    n = f.n
    reach = {v: {v} for v in range(n)}
    for perm in itertools.permutations(range(n)):
        if f.relabel(perm) == f:
            for v in range(n):
                reach[v].add(perm[v])
    return sorted(sorted(s) for s in {frozenset(s) for s in reach.values()})


@pytest.mark.parametrize("n, expected", [(1, 1), (2, 3), (3, 16), (4, 125), (5, 1296)])
def test_counts_match_brute_force(n, expected):
    listed = [f.parent for f in enumerate_forests(n)]
    assert len(listed) == expected == count_forests(n)
    assert len(set(listed)) == expected
    assert set(listed) == brute_force_forests(n)


def test_count_n6():
    assert sum(1 for _ in enumerate_forests(6)) == 16807


def test_cap(monkeypatch):
    with pytest.raises(CapExceeded):
        next(enumerate_forests(8))
    monkeypatch.setenv("PROGENY_MAX_N", "3")
    with pytest.raises(CapExceeded):
        next(enumerate_forests(4))
    assert sum(1 for _ in enumerate_forests(3)) == 16


def test_unlabeled_counts():
    # rooted unlabeled forests on n nodes: 1, 2, 4, 9, 20 (rooted trees on n+1 nodes)
    assert [sum(1 for _ in enumerate_forests(n, unlabeled=True)) for n in range(1, 6)] == [1, 2, 4, 9, 20]


def test_two_isolated_one_orbit():
    assert canonical_code(Forest.empty(2)).orbits == [[0, 1]]


def test_star_orbits():
    f = star_chains([(3,)]).forest
    assert canonical_code(f).orbits == [[0], [1, 2]]


def test_two_three_stars_orbits():
    f = star_chains([(3,), (3,)]).forest
    got = canonical_code(f).orbits
    assert got == automorphism_orbits(f)
    assert got == [[0, 1], [2, 3, 4, 5]]


@pytest.mark.parametrize("n", range(1, 6))
def test_orbits_match_permutation_search(n):
    for f in enumerate_forests(n):
        assert canonical_code(f).orbits == automorphism_orbits(f), f


@settings(max_examples=150, deadline=None)
@given(forests(max_n=10), st.randoms(use_true_random=False))
def test_code_invariant_under_relabeling(f, rnd):
    perm = list(range(f.n))
    rnd.shuffle(perm)
    a, b = canonical_code(f), canonical_code(f.relabel(perm))
    assert a.code == b.code
    # orbits map onto orbits
    mapped = sorted(sorted(perm[v] for v in orb) for orb in a.orbits)
    assert mapped == b.orbits


def test_different_shapes_differ():
    path = new_forest(3, [1, 2, None])
    star = new_forest(3, [2, 2, None])
    assert canonical_code(path).code != canonical_code(star).code
