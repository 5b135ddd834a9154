import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpa.perm import (
    DomainError,
    Permutation,
    as_table,
    bfs_distance_oracle,
    bfs_pair_distance,
    compose,
    inverse,
    inversion_count,
    kendall_distance,
    max_distance,
    order_signatures,
    parity,
    signature_distances,
    table_parities,
)


def perms(n_min=1, n_max=9):
    return st.integers(n_min, n_max).flatmap(lambda n: st.permutations(range(n))).map(Permutation)


def perm_pairs(n_min=1, n_max=9):
    return st.integers(n_min, n_max).flatmap(
        lambda n: st.tuples(st.permutations(range(n)), st.permutations(range(n)))
    ).map(lambda t: (Permutation(t[0]), Permutation(t[1])))


def test_examples():
    assert kendall_distance(Permutation([0, 2, 1]), Permutation([0, 1, 2])) == 1
    assert kendall_distance(Permutation.identity(5), Permutation.reversal(5)) == 10
    assert kendall_distance(Permutation([1, 0, 3, 2]), Permutation([0, 1, 2, 3])) == 2


def test_parse_and_validation():
    assert Permutation.parse("2 1 3", one_based=True).symbols == (1, 0, 2)
    assert Permutation.parse("0,2,1").symbols == (0, 2, 1)
    with pytest.raises(DomainError):
        Permutation([0, 0, 1])
    with pytest.raises(DomainError):
        Permutation([1, 2, 3])
    with pytest.raises(DomainError):
        kendall_distance(Permutation([0, 1]), Permutation([0, 1, 2]))


def test_bfs_refuses_large_n():
    with pytest.raises(DomainError):
        bfs_distance_oracle(Permutation.identity(9), Permutation.identity(9))


def test_exhaustive_n4_against_bfs(s4):
    for a in s4:
        for b in s4:
            d = kendall_distance(a, b)
            assert d == bfs_distance_oracle(a, b)
    # the relabeled table oracle against a plain BFS between the two permutations
    for a, b in itertools.islice(itertools.product(s4, s4), 0, None, 7):
        assert bfs_pair_distance(a, b) == bfs_distance_oracle(a, b)


@pytest.mark.parametrize("n", [5, 6, 7, 8])
def test_random_pairs_against_bfs(n):
    rng = np.random.default_rng(n)
    for _ in range(500):
        a, b = Permutation(rng.permutation(n)), Permutation(rng.permutation(n))
        assert kendall_distance(a, b) == bfs_distance_oracle(a, b)


def test_inversion_count_matches_quadratic():
    rng = np.random.default_rng(1)
    for n in range(0, 40):
        seq = rng.permutation(n).tolist()
        slow = sum(seq[i] > seq[j] for i in range(n) for j in range(i + 1, n))
        assert inversion_count(seq) == slow


@given(perm_pairs())
def test_symmetry_and_identity(pair):
    a, b = pair
    assert kendall_distance(a, b) == kendall_distance(b, a)
    assert (kendall_distance(a, b) == 0) == (a == b)
    assert 0 <= kendall_distance(a, b) <= max_distance(a.n)


@given(st.integers(1, 9).flatmap(lambda n: st.tuples(*[st.permutations(range(n))] * 3)))
def test_triangle_inequality(triple):
    a, b, c = map(Permutation, triple)
    assert kendall_distance(a, c) <= kendall_distance(a, b) + kendall_distance(b, c)


@given(st.integers(1, 9).flatmap(lambda n: st.tuples(*[st.permutations(range(n))] * 3)))
def test_symbol_relabeling_invariance(triple):
    # renaming symbols consistently in both permutations keeps the distance
    a, b, g = map(Permutation, triple)
    assert kendall_distance(compose(g, a), compose(g, b)) == kendall_distance(a, b)


@given(perms())
def test_inverse_and_parity(p):
    e = Permutation.identity(p.n)
    assert compose(p, inverse(p)) == e
    assert compose(inverse(p), p) == e
    assert parity(p) == ("even" if kendall_distance(e, p) % 2 == 0 else "odd")


@given(perm_pairs(2, 9))
def test_parity_of_distance(pair):
    a, b = pair
    same = parity(a) == parity(b)
    assert (kendall_distance(a, b) % 2 == 0) == same


@settings(max_examples=50)
@given(st.integers(2, 40).flatmap(lambda n: st.lists(st.permutations(range(n)), min_size=1, max_size=8)))
def test_signatures_match_scalar(rows):
    table = as_table(rows)
    sigs = order_signatures(table)
    got = signature_distances(sigs, sigs)
    want = np.array([[kendall_distance(Permutation(a), Permutation(b)) for b in rows] for a in rows])
    assert (got == want).all()
    assert table_parities(table).tolist() == [parity(Permutation(r)) == "odd" for r in rows]
