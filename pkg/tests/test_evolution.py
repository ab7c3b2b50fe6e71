import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonconvex.constellation import from_offsets
from nonconvex.evolution import (
    BudgetExceeded,
    driving_term,
    first_appearance,
    survivors_in_window,
    track_prefix,
)
from nonconvex.population import instance_count
from nonconvex.primes import primes_up_to, primorial

from .strategies import admissible_constellations


def test_survivors_examples():
    assert survivors_in_window(5, 2, 3) == [0, 2]
    assert survivors_in_window(7, 4, 5) == [0, 4]


def test_driving_term_example():
    dt = driving_term(11, from_offsets([0, 2]), 7)
    assert dt.survivors == (0, 2) and dt.equals_target and dt.length == 1
    assert dt.term == from_offsets([0, 2])


def test_track_prefix_triple():
    rows = track_prefix(from_offsets([0, 2, 6]), 7, start_stage=2)
    assert rows[0].stage == 2
    assert [r.count for r in rows] == [1, 1, 2, 8]
    assert rows[-1].gamma0 is None


def test_first_appearance():
    assert first_appearance(from_offsets([0, 2]), 13) == 3
    assert first_appearance(from_offsets([0, 2, 4]), 13) is None


def test_budget_exceeded_reports_last_stage():
    with pytest.raises(BudgetExceeded) as info:
        track_prefix(from_offsets([0, 2]), 23, start_stage=2, budget=100)
    # counts run 1, 1, 3, 15, 135
    assert info.value.last_stage == 7


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10**6), st.integers(1, 60), st.sampled_from([2, 3, 5, 7, 11, 13]))
def test_survivors_match_gcd(g, span, stage):
    P = primorial(stage)
    assert survivors_in_window(g, span, stage) == [t for t in range(span + 1) if math.gcd(g + t, P) == 1]


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 10**30), st.integers(1, 500))
def test_survivors_shrink_with_stage(g, span):
    prev = None
    for p in primes_up_to(60):
        cur = set(survivors_in_window(g, span, p))
        if prev is not None:
            assert cur <= prev
        prev = cur


@settings(max_examples=30, deadline=None)
@given(admissible_constellations)
def test_counts_match_population(s):
    for r in track_prefix(s, 13, start_stage=2):
        assert r.count == instance_count(s, 2, r.stage)
