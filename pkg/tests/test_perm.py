from __future__ import annotations

import math
from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropdp.errors import WorkbenchError
from tropdp.perm import (
    ALL_TWO_CYCLES,
    SINGLE_CYCLE,
    TWO_K_CYCLES,
    ClassSpec,
    Permutation,
    all_permutations,
    class_size,
    compose,
    conjugate,
    conjugation_orbit_counts,
    count_completions,
    count_conjugators,
    cycle_type,
    double_factorial,
    enumerate_class,
    inverse,
)


def cyc(text, n):
    return Permutation.parse(text, n)


def test_compose_examples():
    s = cyc("(1 3 2)", 3)
    assert compose(Permutation.identity(3), s) == s
    assert compose(cyc("(1 2)", 2), cyc("(1 2)", 2)) == Permutation.identity(2)
    assert compose(cyc("(1 3)(2 4)", 4), cyc("(1 2)(3 4)", 4)) == cyc("(1 4)(2 3)", 4)
    with pytest.raises(WorkbenchError) as e:
        compose(Permutation.identity(2), Permutation.identity(3))
    assert e.value.code == "DOMAIN_MISMATCH"


def test_compose_convention_is_right_to_left():
    a, b = cyc("(1 2)", 3), cyc("(2 3)", 3)
    ab = compose(a, b)
    assert all(ab[x] == a[b[x]] for x in range(3))


def test_conjugate_examples():
    assert conjugate(Permutation.identity(4), cyc("(1 2 3)", 4)) == Permutation.identity(4)
    assert conjugate(cyc("(1 2 3)", 3), cyc("(1 2)", 3)) == cyc("(1 3 2)", 3)


def test_cycle_type_examples():
    assert sorted(cycle_type(Permutation.identity(3))) == [1, 1, 1]
    assert sorted(cycle_type(cyc("(1 2)", 3))) == [1, 2]
    assert list(cycle_type(cyc("(1 2 3 4)", 4))) == [4]


def test_class_sizes_examples():
    assert len(enumerate_class(4, SINGLE_CYCLE)) == 6
    assert len(enumerate_class(6, ALL_TWO_CYCLES)) == 15
    assert len(enumerate_class(6, TWO_K_CYCLES)) == 40
    with pytest.raises(WorkbenchError) as e:
        enumerate_class(5, ALL_TWO_CYCLES)
    assert e.value.code == "INVALID_SPEC"


def test_enumeration_is_lexicographic_and_duplicate_free():
    for n, spec in [(5, SINGLE_CYCLE), (8, ALL_TWO_CYCLES), (6, TWO_K_CYCLES), (5, ClassSpec.explicit([2, 2, 1]))]:
        out = [tuple(p) for p in enumerate_class(n, spec)]
        assert out == sorted(set(out))
        brute = sorted(p for p in permutations(range(n)) if sorted(cycle_type(p)) == sorted(spec.target_type(n)))
        assert out == brute


@pytest.mark.parametrize("k", range(2, 7))
def test_class_counts_match_closed_forms(k):
    assert len(enumerate_class(k, SINGLE_CYCLE)) == math.factorial(k - 1)
    assert len(enumerate_class(2 * k, ALL_TWO_CYCLES)) == double_factorial(2 * k - 1)
    assert class_size(2 * k, TWO_K_CYCLES) == math.factorial(2 * k - 1) // k
    if k <= 5:
        assert len(enumerate_class(2 * k, TWO_K_CYCLES)) == math.factorial(2 * k - 1) // k


def test_count_conjugators_examples():
    t = cyc("(1 2)", 3)
    assert count_conjugators(t, t) == 2
    assert count_conjugators(cyc("(1 2 3)", 3), Permutation.identity(3)) == 0
    assert count_conjugators(Permutation.identity(4), Permutation.identity(4)) == 24


def test_count_completions_examples():
    assert count_completions(cyc("(1 2)(3 4)", 4)) == 2
    for r in enumerate_class(6, ALL_TWO_CYCLES):
        assert count_completions(r) == 8
    # S²₂ = {(1 2)} and (1 2)(1 2) = id has type (1,1), which is the two-1-cycle class
    assert count_completions(cyc("(1 2)", 2)) == 1
    with pytest.raises(WorkbenchError) as e:
        count_completions(cyc("(1 2 3 4)", 4))
    assert e.value.code == "NOT_IN_CLASS"


@pytest.mark.parametrize("n", range(1, 7))
def test_orbit_is_full_class_with_constant_conjugator_count(n):
    seen_types = {}
    for rho in all_permutations(n):
        t = tuple(sorted(cycle_type(rho)))
        if t in seen_types:
            continue
        orbit = conjugation_orbit_counts(rho)
        cls = {tuple(p) for p in enumerate_class(n, ClassSpec.explicit(t))}
        assert set(orbit) == cls
        assert set(orbit.values()) == {math.factorial(n) // len(cls)}
        seen_types[t] = len(cls)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_completion_count_constant(k):
    counts = {count_completions(r) for r in enumerate_class(2 * k, ALL_TWO_CYCLES)}
    assert counts == {double_factorial(2 * k - 2)}


perms5 = st.permutations(list(range(5))).map(Permutation)


@given(perms5, perms5)
def test_conjugation_preserves_cycle_type(rho, pi):
    c = conjugate(rho, pi)
    assert sorted(cycle_type(c)) == sorted(cycle_type(rho))
    assert c == compose(inverse(pi), compose(rho, pi))


@given(perms5, perms5, perms5)
def test_composition_is_associative(a, b, c):
    assert compose(a, compose(b, c)) == compose(compose(a, b), c)
    assert compose(a, inverse(a)) == Permutation.identity(5)


@given(perms5)
def test_parse_round_trip(p):
    assert Permutation.parse(str(p), 5) == p
