import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonconvex.constellation import (
    ConstellationError,
    admissible_residues,
    from_gaps,
    from_offsets,
    gap_histogram,
    is_admissible,
    is_counterexample,
    legacy_score,
    minimal_repetition_gap,
    mirror,
    nonconvexity_score,
    nu,
    repetition,
)
from nonconvex.primes import prime_gap_constellation, primes_up_to, primorial

from .strategies import brute_admissible, constellations, offset_lists

TABLE1_PRIMES = {1: 1, 2: 86, 4: 92, 6: 112, 8: 44, 10: 43, 12: 32, 14: 18, 16: 8, 18: 9, 20: 3, 22: 5, 24: 2, 26: 2, 28: 1, 34: 1}


@pytest.mark.parametrize("offsets, gaps", [([0, 2], [2]), ([0, 2, 6, 8], [2, 4, 2])])
def test_from_offsets(offsets, gaps):
    assert list(from_offsets(offsets).gaps) == gaps


@pytest.mark.parametrize("bad", [[0, 2, 2], [1, 3], [0, 4, 2], [0]])
def test_from_offsets_rejects(bad):
    with pytest.raises(ConstellationError):
        from_offsets(bad)


def test_nu_examples():
    assert nu(from_offsets([0, 2]), 2) == 1
    assert nu(from_offsets([0, 2, 6, 8]), 3) == 2
    with pytest.raises(ValueError):
        nu(from_offsets([0, 2]), 4)


def test_admissible_residues_examples():
    assert admissible_residues(from_offsets([0, 2]), 3) == {2}
    assert admissible_residues(from_offsets([0, 2, 6]), 5) == {1, 2}


@pytest.mark.parametrize("offsets, expected", [([0, 2, 4], False), ([0, 2, 6, 8], True), ([0, 2], True), ([0, 1], False)])
def test_is_admissible_examples(offsets, expected):
    assert is_admissible(from_offsets(offsets)) is expected


def test_scores():
    twin = from_offsets([0, 2])
    assert nonconvexity_score(twin) == 0
    assert legacy_score(twin) == 0  # k - pi(w) = 2 - pi(3)
    assert not is_counterexample(twin)
    p = prime_gap_constellation(459)
    assert nonconvexity_score(p) == 0 and not is_counterexample(p)
    fake = from_gaps([2] + [7] * 444 + [3158 - 2 - 7 * 444])  # any (446, 3158) shape
    assert (fake.length, fake.span) == (446, 3158)
    assert nonconvexity_score(fake) == 0
    assert legacy_score(fake) == 1


def test_mirror_examples():
    assert list(mirror(from_gaps([2, 4])).gaps) == [4, 2]


def test_gap_histogram_examples():
    assert gap_histogram(from_gaps([2, 2])) == {2: 2}
    assert gap_histogram(prime_gap_constellation(459)) == TABLE1_PRIMES


def test_repetition():
    assert is_admissible(repetition(2, 6))
    assert not is_admissible(repetition(2, 2))
    big = repetition(459, primorial(457))
    assert big.span == 459 * primorial(457)


def brute_min_repetition_gap(J):
    g = 1
    while not brute_admissible([i * g for i in range(J + 1)]):
        g += 1
    return g


@pytest.mark.parametrize("J", [1, 2, 3, 4, 5, 6])
def test_minimal_repetition_gap_brute(J):
    assert minimal_repetition_gap(J) == brute_min_repetition_gap(J)


def test_minimal_repetition_gap_459():
    assert minimal_repetition_gap(459) == primorial(457)


@given(constellations)
def test_round_trip(s):
    assert from_offsets(s.offsets) == s
    assert from_gaps(s.gaps) == s
    assert mirror(mirror(s)) == s


@given(offset_lists())
def test_admissible_matches_brute_force(offsets):
    assert is_admissible(from_offsets(offsets)) == brute_admissible(offsets)


@given(constellations)
def test_nu_properties(s):
    m = mirror(s)
    for q in primes_up_to(s.span + 10):
        v = nu(s, q)
        assert 1 <= v <= min(q, s.length + 1)
        assert v == nu(m, q)
        assert len(admissible_residues(s, q)) == q - v
        if q > s.span:
            assert v == s.length + 1
    assert is_admissible(s) == is_admissible(m)


@settings(max_examples=30)
@given(st.integers(1, 300))
def test_prime_constellation_is_never_nonconvex(J):
    assert nonconvexity_score(prime_gap_constellation(J)) == 0
