import math
import random

import numpy as np
import pytest
from hypothesis import given, settings

from nonconvex.constellation import from_offsets
from nonconvex.pcoords import decode, leading_term
from nonconvex.population import instance_count
from nonconvex.primes import primorial
from nonconvex.search import (
    CheckpointError,
    HorizonOfSurvival,
    SearchError,
    bfs,
    dfs_zero_run,
    lift,
    load_checkpoint,
    min_gamma,
    save_checkpoint,
    scan,
    survival_check,
)

from .strategies import admissible_constellations


def brute_instances(s, modulus):
    return [r for r in range(modulus) if all(math.gcd(r + h, modulus) == 1 for h in s.offsets)]


def test_scan_and_lift_triple():
    s = from_offsets([0, 2, 6])
    f = scan(s, 5)
    assert f.values() == [11, 17] == brute_instances(s, 30)
    g = lift(f, s, 7)
    assert len(g) == g.count == 8
    assert g.values() == brute_instances(s, 210)


def test_bfs_counts_triple():
    s = from_offsets([0, 2, 6])
    res = bfs(s, 2, 7)
    assert [c.count for c in res.stages] == [1, 1, 2, 8]
    assert res.frontier.values() == brute_instances(s, 210)


def test_lift_requires_next_prime():
    s = from_offsets([0, 2])
    with pytest.raises(SearchError):
        lift(scan(s, 5), s, 11)


def test_lift_to_inadmissible_stage_is_empty():
    s = from_offsets([0, 6, 12, 18, 24])  # every class mod 5 covered
    f = scan(s, 3)
    assert len(f) == 2
    g = lift(f, s, 5)
    assert len(g) == 0 and g.count == 0


def test_budget_zero():
    s = from_offsets([0, 2])
    g = lift(scan(s, 5), s, 7, budget=0)
    assert len(g) == 0 and g.truncated


def test_truncation_keeps_smallest():
    s = from_offsets([0, 2, 6])
    full = bfs(s, 2, 13).frontier
    cut = bfs(s, 2, 13, budget=100).frontier
    assert cut.truncated and not full.truncated
    assert cut.count == full.count == 640
    assert cut.values() == full.values()[:100]


@settings(max_examples=200, deadline=None)
@given(admissible_constellations)
def test_bfs_matches_direct_scan(s):
    for stage, modulus in ((7, 210), (11, 2310)):
        f = bfs(s, 2, stage).frontier
        brute = brute_instances(s, modulus)
        assert f.values() == brute
        assert f.count == len(brute) == instance_count(s, 2, stage)


@settings(max_examples=25, deadline=None)
@given(admissible_constellations)
def test_min_gamma_is_frontier_minimum(s):
    f = bfs(s, 2, 17).frontier
    r = min_gamma(s, 17, start_stage=7)
    assert r.optimal
    assert r.value == min(f.values())
    assert r.coords == f.coords(0)


def test_min_gamma_twin():
    assert min_gamma(from_offsets([0, 2]), 5).value == 11 == brute_instances(from_offsets([0, 2]), 30)[0]


def test_frontier_members_reverify():
    s = from_offsets([0, 4, 6, 10, 12, 16])
    f = bfs(s, 2, 29).frontier
    rng = random.Random(3)
    for i in rng.sample(range(len(f)), 200):
        g = decode(f.coords(i))
        assert all(math.gcd(g + h, primorial(29)) == 1 for h in s.offsets)


def test_threaded_lift_identical():
    s = from_offsets([0, 2])
    f = bfs(s, 2, 19).frontier
    assert len(f) > 100_000
    a = lift(f, s, 23, threads=1)
    b = lift(f, s, 23, threads=4)
    assert np.array_equal(a.digits, b.digits) and a.prefix == b.prefix


def test_survival_check():
    twin = from_offsets([0, 2])
    assert survival_check(5, twin) == "certified"
    assert survival_check(7, twin) == "dead"
    p = 2**89 - 1
    assert survival_check(p, from_offsets([0, 2**90])) in ("dead", "probable")


def test_horizon():
    h = HorizonOfSurvival(7)
    assert h.interval == (49, 121)
    assert 50 in h and 121 not in h


def test_dfs_zero_run_twin():
    twin = from_offsets([0, 2])
    f = scan(twin, 5)
    one = dfs_zero_run(twin, f, 1)
    assert [c.value for c in one] == [11, 17, 29]
    assert {c.status for c in one} == {"certified"}
    two = dfs_zero_run(twin, f, 2)
    # 11 is struck by the zero digit at the 11-stage
    assert [c.value for c in two] == [17, 29]


def test_dfs_zero_run_prunes():
    s = from_offsets([0, 2, 6])
    f = scan(s, 5)  # 11 and 17
    # at stage 7: 11+h ok? 11,13,17 yes; 17,19,23 yes; stage 11: 11 is struck
    assert [c.value for c in dfs_zero_run(s, f, 2)] == [17]


def test_checkpoint_round_trip(tmp_path):
    s = from_offsets([0, 2, 6, 8])
    f = bfs(s, 2, 17).frontier
    p1, p2 = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
    save_checkpoint(f, p1)
    g = load_checkpoint(p1, s)
    assert g.values() == f.values() and g.count == f.count and g.stage == 17
    save_checkpoint(g, p2)
    assert p1.read_bytes() == p2.read_bytes()
    head = p1.read_text().splitlines()[:5]
    assert [line.split(":")[0] for line in head] == ["version", "tuple-digest", "stage", "count", "truncated"]
    with pytest.raises(CheckpointError):
        load_checkpoint(p1, from_offsets([0, 2, 6]))


def test_resume_matches_uninterrupted(tmp_path):
    s = from_offsets([0, 2, 6, 8, 12])
    path = tmp_path / "run.ckpt"
    save_checkpoint(bfs(s, 2, 13, budget=500).frontier, path)
    resumed = bfs(s, 2, 23, budget=500, frontier=load_checkpoint(path, s)).frontier
    straight = bfs(s, 2, 23, budget=500).frontier
    out1, out2 = tmp_path / "x", tmp_path / "y"
    save_checkpoint(resumed, out1)
    save_checkpoint(straight, out2)
    assert out1.read_bytes() == out2.read_bytes()


def test_large_frontier_minima_struck_at_211(eng459):
    # tuples 22, 23 and their mirrors 35, 34 have the largest frontiers
    at199 = {22: (80, 181), 23: (18, 181), 34: (1, 191), 35: (82, 181)}
    for i, term in at199.items():
        s = eng459[i]
        r = min_gamma(s, 199)
        assert leading_term(r.coords) == term
        # the stage-199 minimum loses an offset to 211, so it cannot be the minimum mod 211#
        assert any((r.value + h) % 211 == 0 for h in s.offsets)
        later = min_gamma(s, 211)
        assert later.value > r.value
        assert all(math.gcd(later.value + h, primorial(211)) == 1 for h in s.offsets)
