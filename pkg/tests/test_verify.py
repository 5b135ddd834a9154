import itertools

import numpy as np
import pytest

from kpa.arrayfile import dumps, loads, read_array, write_array
from kpa.perm import DomainError, Permutation, kendall_distance
from kpa.verify import PermArray, certify, in_restricted, min_pairwise_distance


def brute_min(rows):
    return min(kendall_distance(Permutation(a), Permutation(b)) for a, b in itertools.combinations(rows, 2))


def test_full_s4_has_min_distance_one(s4):
    report = certify(PermArray(s4), 1)
    assert report.passed and report.size == 24 and report.min_distance == 1


def test_singleton_and_empty():
    report = certify(PermArray([[0, 1, 2]]), 3)
    assert report.infinite and report.passed
    with pytest.raises(DomainError):
        min_pairwise_distance(PermArray([], n=3))
    with pytest.raises(DomainError):
        certify(PermArray([[0, 1]]), 0)


def test_duplicates_are_dropped_and_counted():
    a = PermArray([[0, 1, 2], [2, 1, 0], [0, 1, 2]])
    assert len(a) == 2 and a.duplicates == 1
    assert certify(a, 3).passed


@pytest.mark.parametrize("threads", [1, 4])
def test_random_arrays_match_brute_force(threads):
    rng = np.random.default_rng(7)
    for n in (5, 7, 9):
        rows = [rng.permutation(n).tolist() for _ in range(60)]
        a = PermArray(rows)
        report = min_pairwise_distance(a, threads=threads)
        dist = report.min_distance
        assert dist == brute_min(a.table.tolist())
        i, j = report.witness_pair
        assert kendall_distance(Permutation(a.table[i]), Permutation(a.table[j])) == dist


def test_witness_is_deterministic_across_threads():
    rng = np.random.default_rng(3)
    a = PermArray([rng.permutation(12) for _ in range(3000)])
    one, many = min_pairwise_distance(a, threads=1), min_pairwise_distance(a, threads=8)
    assert (one.min_distance, one.witness_pair) == (many.min_distance, many.witness_pair)


def test_restriction_check():
    table = np.array([[0, 1, 3, 2], [3, 0, 1, 2], [1, 0, 2, 3]])
    assert in_restricted(table, 2).tolist() == [True, True, False]
    report = certify(PermArray(table, restriction_m=2), 1)
    assert not report.restriction_ok and not report.passed and report.bad_members == [2]


def test_large_guard(monkeypatch):
    import kpa.verify as v

    monkeypatch.setattr(v, "LARGE_ARRAY", 5)
    a = PermArray(list(itertools.permutations(range(3))))
    with pytest.raises(DomainError):
        certify(a, 1)
    assert certify(a, 1, allow_large=True).passed


def test_file_round_trip(tmp_path):
    a = PermArray([[2, 1, 0], [0, 1, 2]], claimed_d=3, restriction_m=None, provenance="unit test")
    path = tmp_path / "a.txt"
    write_array(path, a, extra={"note": "x"})
    b = read_array(path)
    assert b.as_set() == a.as_set() and b.claimed_d == 3 and b.provenance == "unit test"
    assert dumps(a).splitlines()[-2:] == ["0 1 2", "2 1 0"]
    assert dumps(a, keep_order=True).splitlines()[-2:] == ["2 1 0", "0 1 2"]


def test_one_based_detection():
    a = loads("# n=3 d=1\n1 2 3\n3 2 1\n")
    assert a.as_set() == {(0, 1, 2), (2, 1, 0)}
    with pytest.raises(DomainError):
        read_array("/nonexistent/file.txt")
