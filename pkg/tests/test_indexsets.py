import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gegenapprox.indexsets import (IndexSet, MultiIndex, ResourceCapError, aleph, ball_volume,
                                   brute_force_set, cardinality_estimate, efficiency_ratio,
                                   enumerate_set, in_ball, lq_norm, parse_q)
from gegenapprox.polycore import DomainError


def test_lq_norm_examples():
    assert lq_norm((3, 4), 2) == pytest.approx(5.0, rel=1e-15)
    assert lq_norm((3, 4), math.inf) == 4
    assert lq_norm((1, 1, 1), 0.5) == pytest.approx(9.0, rel=1e-14)
    assert lq_norm((0, 0), 0.5) == 0.0


def test_parse_q():
    assert parse_q("1/2") == 0.5
    assert parse_q("inf") == math.inf
    with pytest.raises(DomainError):
        parse_q(1e-4)
    with pytest.raises(DomainError):
        parse_q(-1)


def test_multi_index_accessors():
    k = MultiIndex((0, 3, 0))
    assert k.d == 3 and k.total == 3 and k.aleph == 2
    assert k.norm(math.inf) == 3
    with pytest.raises(DomainError):
        MultiIndex((1, -1))
    with pytest.raises(DomainError):
        MultiIndex(())


def test_aleph_examples():
    assert aleph((0, 3, 0)) == 2
    assert aleph((1, 1)) == 0
    assert aleph((0, 0, 0, 0)) == 4


def test_enumerate_examples():
    assert len(enumerate_set(math.inf, 2, 2)) == 9
    assert len(enumerate_set(1, 2, 2)) == 6
    got = [tuple(k) for k in enumerate_set(2, 2, 2).members]
    assert got == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)]
    assert len(enumerate_set(1, 30, 2)) == 496
    assert len(enumerate_set(math.inf, 30, 2)) == 961


def test_enumerate_ties_are_members():
    # (3, 4) has ||k||_2 = 5 exactly
    assert (3, 4) in enumerate_set(2, 5, 2)
    assert (3, 4) not in enumerate_set(2, 4.999, 2)


def test_enumerate_fractional_radius():
    s = enumerate_set(2, 2.5, 2)
    assert sorted(tuple(k) for k in s) == sorted(
        k for k in itertools.product(range(3), repeat=2) if math.hypot(*k) <= 2.5)


@pytest.mark.parametrize("q", [0.5, 1, 1.5, 2, 3, math.inf])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_enumerate_matches_brute_force(q, d):
    for N in ([0, 1, 2, 3, 5, 7.5, 11, 20] if d < 3 else [0, 1, 2.5, 6, 11]):
        s = enumerate_set(q, N, d)
        ref = brute_force_set(q, N, d)
        assert np.array_equal(s.keys, ref), (q, N, d)


def test_enumeration_is_lexicographic():
    keys = enumerate_set(1.3, 9, 3).keys
    tuples = [tuple(r) for r in keys]
    assert tuples == sorted(tuples)


def test_resource_cap():
    with pytest.raises(ResourceCapError):
        enumerate_set(2, 100, 3, cap=1000)
    with pytest.raises(ResourceCapError):
        enumerate_set(math.inf, 100, 3, cap=1000)


def test_indexset_csv_round_trip():
    s = enumerate_set(2, 3, 2)
    lines = s.to_csv(["q=2"]).splitlines()
    assert lines[0] == "# q=2"
    assert lines[1] == "k_1,k_2"
    rows = [tuple(int(v) for v in ln.split(",")) for ln in lines[2:]]
    assert rows == [tuple(k) for k in s.keys]


@settings(max_examples=2000, deadline=None)
@given(st.lists(st.integers(0, 60), min_size=1, max_size=6),
       st.floats(0.05, 8.0), st.floats(0.05, 8.0), st.booleans())
def test_norm_inequalities(k, a, b, r_inf):
    # ||k||_r <= ||k||_s <= d^(1/s - 1/r) ||k||_r for 0 < s <= r <= inf
    s, r = min(a, b), max(a, b)
    if r_inf:
        r = math.inf
    d = len(k)
    ks, kr = lq_norm(k, s), lq_norm(k, r)
    const = d ** (1.0 / s - (0.0 if math.isinf(r) else 1.0 / r))
    assert kr <= ks * (1 + 1e-12) + 1e-12
    assert ks <= const * kr * (1 + 1e-12) + 1e-12


@pytest.mark.parametrize("d", [2, 3])
def test_nesting_in_q(d):
    qs = [0.5, 1, 2, 4, math.inf]
    for N in (3, 6.5):
        sets = [set(map(tuple, enumerate_set(q, N, d).keys)) for q in qs]
        for small, big in zip(sets, sets[1:]):
            assert small <= big


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([0.5, 1.0, 2.0, 3.0, math.inf]), st.floats(0, 12), st.integers(1, 3))
def test_lower_set(q, N, d):
    members = set(map(tuple, enumerate_set(q, N, d).keys))
    for k in members:
        for j in range(d):
            if k[j] > 0:
                t = list(k)
                t[j] -= 1
                assert tuple(t) in members


def test_ball_volume_examples():
    assert ball_volume(2, 2) == pytest.approx(math.pi / 4, rel=1e-14)
    assert ball_volume(1, 2) == pytest.approx(0.5, rel=1e-14)
    assert ball_volume(math.inf, 3) == 1.0


def test_cardinality_estimate():
    est = cardinality_estimate(math.inf, 10, 2)
    assert est == pytest.approx(100.0)
    exact = len(enumerate_set(math.inf, 10, 2))
    assert exact == 121
    # gap shrinks like 1/N
    for q in (1, 2):
        gaps = [abs(len(enumerate_set(q, N, 2)) / cardinality_estimate(q, N, 2) - 1) for N in (20, 40, 80)]
        assert gaps[1] < gaps[0] and gaps[2] < gaps[1]
        assert gaps[2] * 80 < 5


def test_efficiency_ratio():
    assert efficiency_ratio(1, 2) == pytest.approx(2 * (1 / math.gamma(1.5)) ** 2 / 2, rel=1e-13)
    assert efficiency_ratio(1, 2) > 1
    assert efficiency_ratio(2 - 1e-9, 5) == pytest.approx(1.0, abs=1e-6)
    for q in (0.5, 1, 1.5):
        for d in range(2, 9):
            assert efficiency_ratio(q, d) > 1
    with pytest.raises(DomainError):
        efficiency_ratio(2, 3)


def test_in_ball_and_contains():
    s = enumerate_set(0.5, 4, 2)
    assert (0, 4) in s and (1, 1) in s
    assert (1, 2) not in s
    assert in_ball((1, 1), 0.5, 4)
    assert isinstance(s, IndexSet)
