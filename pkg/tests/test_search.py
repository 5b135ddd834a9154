import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpa.perm import DomainError
from kpa.search import (
    SearchSpace,
    best_of_restarts,
    clique_exact,
    max_clique,
    pnmd_search,
    random_greedy,
)
from kpa.verify import certify, in_restricted


@pytest.mark.parametrize(
    "space",
    [SearchSpace.full(5), SearchSpace.restricted_sorted(6, 2), SearchSpace.restricted_sorted(5, 5),
     SearchSpace.fixed_positions(6, (4, 1))],
)
def test_unrank_enumerates_space_in_order(space):
    members = space.members()
    assert len(members) == space.size
    assert len({tuple(r) for r in members}) == space.size
    assert space.contains(members).all()
    assert [tuple(r) for r in members] == sorted(tuple(r) for r in members)


def test_space_sizes_and_membership():
    assert SearchSpace.restricted_sorted(14, 2).size == 14 * 13
    assert SearchSpace.fixed_positions(8, (0, 7)).size == math.factorial(6)
    s = SearchSpace.restricted_sorted(5, 2)
    assert s.contains([[0, 4, 1, 3, 2]]).all()
    assert not s.contains([[1, 0, 2, 3, 4]]).any()
    with pytest.raises(DomainError):
        SearchSpace.fixed_positions(5, (1, 1))
    with pytest.raises(DomainError):
        random_greedy(SearchSpace.full(14), 3, 1)


def test_random_greedy_is_reproducible_and_certified():
    space = SearchSpace.full(6)
    a = random_greedy(space, 4, 3, rng_seed=11)
    b = random_greedy(space, 4, 3, rng_seed=11)
    assert np.array_equal(a.table, b.table)
    assert certify(a, 4).passed
    assert "PCG64(11)" in a.provenance


def test_zero_seeds_is_lexicographic_greedy():
    a = random_greedy(SearchSpace.full(4), 2, 0)
    # lexicographic greedy at distance 2 picks the even permutations of S_4
    assert len(a) == 12
    assert a.table[0].tolist() == [0, 1, 2, 3]


def test_greedy_is_maximal():
    space = SearchSpace.full(5)
    a = random_greedy(space, 3, 2, rng_seed=5)
    from kpa.perm import order_signatures, signature_distances

    dist = signature_distances(order_signatures(space.members()), order_signatures(a.table)).min(axis=1)
    # every member not chosen is too close to something chosen
    chosen = {tuple(r) for r in a.table.tolist()}
    for row, dmin in zip(space.members().tolist(), dist):
        if tuple(row) not in chosen:
            assert dmin < 3


def test_best_of_restarts_prefix_and_threads():
    space = SearchSpace.full(6)
    one = best_of_restarts(space, 5, 1, rng_seed=3)
    plain = random_greedy(space, 5, 1, rng_seed=3)
    assert np.array_equal(one.table, plain.table)
    a = best_of_restarts(space, 5, 12, rng_seed=3, threads=1)
    b = best_of_restarts(space, 5, 12, rng_seed=3, threads=4)
    assert np.array_equal(a.table, b.table) and a.provenance == b.provenance
    assert len(a) >= len(one)


def test_pnmd_search_stays_restricted():
    a = pnmd_search(9, 2, 6, budget=5, rng_seed=1)
    assert in_restricted(a.table, 7).all()
    assert certify(a, 6).passed and a.restriction_m == 2


def test_fixed_positions_search():
    space = SearchSpace.fixed_positions(8, (6, 7))
    a = best_of_restarts(space, 5, 4)
    assert (a.table[:, 6] == 6).all() and (a.table[:, 7] == 7).all()


def nx_clique_size(space, d):
    members = space.members()
    g = nx.Graph()
    g.add_nodes_from(range(len(members)))
    from kpa.perm import order_signatures, signature_distances

    sig = order_signatures(members)
    dist = signature_distances(sig, sig)
    g.add_edges_from((i, j) for i, j in itertools.combinations(range(len(members)), 2) if dist[i, j] >= d)
    return max(len(c) for c in nx.find_cliques(g))


@pytest.mark.parametrize("d,expected", [(1, 24), (2, 12), (3, 5), (4, 3), (5, 2), (6, 2)])
def test_clique_exact_n4(d, expected):
    got = clique_exact(SearchSpace.full(4), d)
    assert len(got) == expected == nx_clique_size(SearchSpace.full(4), d)
    assert certify(got, d).passed


@pytest.mark.parametrize("n,m,d", [(5, 2, 3), (6, 2, 3), (6, 2, 4), (6, 3, 5), (7, 2, 5)])
def test_clique_exact_restricted_against_networkx(n, m, d):
    space = SearchSpace.restricted_sorted(n, m)
    assert len(clique_exact(space, d)) == nx_clique_size(space, d)


def test_clique_guard():
    with pytest.raises(DomainError):
        clique_exact(SearchSpace.full(8), 3)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 40), st.floats(0.05, 0.9), st.integers(0, 10**6))
def test_max_clique_random_graphs(count, density, seed):
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((count, count)) < density, 1)
    adj = upper | upper.T
    clique = max_clique(adj)
    assert all(adj[i, j] for i, j in itertools.combinations(clique, 2))
    g = nx.from_numpy_array(adj.astype(int))
    assert len(clique) == max(len(c) for c in nx.find_cliques(g))


@pytest.mark.parametrize("n,d", [(4, 3), (5, 4), (5, 6)])
def test_greedy_never_beats_clique(n, d):
    space = SearchSpace.full(n)
    best = len(clique_exact(space, d))
    for seed in range(10):
        assert len(random_greedy(space, d, 1, rng_seed=seed)) <= best
