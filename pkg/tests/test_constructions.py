import math

import numpy as np
import pytest

from kpa import constructions as c
from kpa.perm import DomainError, Permutation, kendall_distance
from kpa.resources import load_array
from kpa.search import SearchSpace, best_of_restarts, clique_exact
from kpa.verify import PermArray, certify, in_restricted


def test_halve_examples(s4):
    s3 = PermArray([[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]], claimed_d=1)
    assert len(c.halve_even(s3)) == 3
    out = c.halve_even(PermArray(s4, claimed_d=1))
    assert len(out) == 12 and out.claimed_d == 2
    with pytest.raises(DomainError):
        c.halve_even(PermArray(s4, claimed_d=2))


def test_insert_example():
    out = c.insert_symbol(PermArray([[0, 1, 2, 3]], claimed_d=2))
    assert [r.index(4) for r in out.table.tolist()] == [0, 2, 4]


@pytest.mark.parametrize("seed", range(20))
def test_insert_and_halve_on_random_inputs(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 8))
    d = int(rng.integers(1, n * (n - 1) // 2 // 2 + 1)) | 1
    a = best_of_restarts(SearchSpace.full(n), d, 1, rng_seed=seed)
    ins = c.insert_symbol(a)
    assert len(ins) == math.ceil((n + 1) / d) * len(a) and ins.n == n + 1
    assert certify(ins, d).passed
    half = c.halve_even(a)
    assert len(half) >= math.ceil(len(a) / 2) and certify(half, d + 1).passed


def test_compose_with_pattern_set():
    outer = load_array("pattern_5_2_3")
    assert outer.restriction_m == 2 and len(outer) == 6
    inner = PermArray([[0, 1, 2]], claimed_d=3)
    out = c.compose(outer, inner)
    assert out.as_set() == outer.as_set()
    rev = PermArray([[2, 1, 0]], claimed_d=3)
    assert len(c.compose(outer, rev)) == 6
    with pytest.raises(DomainError):
        c.compose(outer, PermArray([[0, 1, 2, 3]], claimed_d=3))


def test_compose_product_size():
    outer = c.five_array(8)  # (8,2,6)
    inner = best_of_restarts(SearchSpace.full(6), 6, 5)
    out = c.compose(outer, inner)
    assert len(out) == len(outer) * len(inner)


def test_compose_sum_fixed_position_arrays():
    outer = c.five_array(8)
    inners = {}
    for tau in outer.table.tolist():
        place = c.large_symbol_placement(tau, 2)
        inners[tuple(tau)] = best_of_restarts(SearchSpace.fixed_positions(8, place), 6, 3)
    out = c.compose_sum(outer, inners)
    assert len(out) == sum(len(v) for v in inners.values())
    assert len(out) >= len(outer) * len(best_of_restarts(SearchSpace.full(6), 6, 3))
    bad = dict(inners)
    key = next(iter(bad))
    bad[key] = PermArray([[0, 1, 2, 3, 4, 5, 6, 7]], claimed_d=6)
    with pytest.raises(DomainError):
        c.compose_sum(outer, bad)


def test_compose_sum_single():
    outer = PermArray([[0, 1, 2, 3]], claimed_d=3, restriction_m=1)
    inner = PermArray([[0, 1, 2, 3], [2, 1, 0, 3]], claimed_d=3)
    assert c.compose_sum(outer, {(0, 1, 2, 3): inner}).as_set() == inner.as_set()


@pytest.mark.parametrize("n", range(2, 13))
def test_two_point_distance(n):
    for m in range(1, n):
        a = c.two_point_array(n, m)
        x, y = a.perms
        assert kendall_distance(x, y) == m * n - m * (m + 1) // 2


def test_two_point_examples():
    assert c.two_point_array(5, 1).claimed_d == 4
    assert c.two_point_array(13, 2).claimed_d == 23


def test_three_and_five_match_shipped_tables():
    assert c.three_array(9).as_set() == load_array("table4_9_2_10").as_set()
    assert c.five_array(12).as_set() == load_array("table5_12_2_10").as_set()
    assert c.five_array(13).as_set() == load_array("table5_13_2_11").as_set()


@pytest.mark.parametrize("n", range(6, 21))
def test_three_and_five_certify(n):
    assert certify(c.three_array(n), n + n // 3 - 2).passed
    assert certify(c.five_array(n), n - 2).passed


@pytest.mark.parametrize("n", range(4, 41))
def test_pattern_d3_counts(n):
    a = c.pattern_d3(n)
    assert len(a) == c.pattern_d3_size(n)
    assert in_restricted(a.table, 2).all()


@pytest.mark.parametrize("n", range(5, 40, 2))
def test_pattern_d4_counts(n):
    assert len(c.pattern_d4(n)) == c.pattern_d4_size(n)


def test_pattern_small_cases():
    assert len(c.pattern_d4(5)) == 3 and len(c.pattern_d4(7)) == 6
    with pytest.raises(DomainError):
        c.pattern_d4(8)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_patterns_are_not_above_the_optimum(n):
    assert len(clique_exact(SearchSpace.restricted_sorted(n, 2), 3)) >= len(c.pattern_d3(n))


def test_shipped_pattern_lists():
    assert certify(load_array("pattern_5_2_3"), 3).passed
    assert certify(load_array("pattern_10_2_3_corrected"), 3).passed
    assert len(load_array("pattern_10_2_3_corrected")) == 21
    assert certify(load_array("pattern_10_2_3"), 3).min_distance == 2


def test_outputs_self_certify(monkeypatch):
    import kpa.constructions as mod

    real = mod.certify

    def broken(a, d, **kw):
        report = real(a, d, **kw)
        report.passed = False
        return report

    monkeypatch.setattr(mod, "certify", broken)
    with pytest.raises(AssertionError):
        c.five_array(8)
