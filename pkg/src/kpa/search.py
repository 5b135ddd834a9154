"""Randomized-greedy and exact clique search over permutation spaces.

Three spaces are supported:

* ``full``: all ``n!`` permutations, in lexicographic order;
* ``restricted_sorted(m)``: members of S_{n,m} (the ``n - m`` smallest symbols
  in increasing order), enumerated position-set-major, arrangement-minor;
* ``fixed_positions``: the ``m`` largest symbols pinned to given positions,
  the rest in any order.

All randomness comes from numpy's PCG64 generator seeded explicitly, so a run
is reproducible from its seed.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .perm import DomainError, distances_to, order_signatures, signature_distances
from .verify import PermArray, certify, default_threads, in_restricted

log = logging.getLogger(__name__)

MAX_SPACE = 10**9
CLIQUE_GUARD = 5040
RNG_NAME = "PCG64"
DEFAULT_SCHEDULE = (1,)
_CHUNK_CELLS = 1 << 22


def _lehmer_unrank(ranks: np.ndarray, items: np.ndarray) -> np.ndarray:
    """Lexicographic unranking of arrangements of ``items`` (sorted ascending)."""
    ranks = np.asarray(ranks, dtype=np.int64).copy()
    k = len(items)
    out = np.empty((len(ranks), k), dtype=np.int64)
    avail = np.ones((len(ranks), k), dtype=bool)
    for i in range(k):
        f = math.factorial(k - 1 - i)
        digit = ranks // f
        ranks -= digit * f
        slot = np.argmax(np.cumsum(avail, axis=1) == (digit + 1)[:, None], axis=1)
        out[:, i] = items[slot]
        avail[np.arange(len(ranks)), slot] = False
    return out


def _restricted_unrank(ranks: np.ndarray, n: int, m: int) -> np.ndarray:
    """Lexicographic unranking of S_{n,m}.

    At each position the next small symbol (if any remain) sorts before every
    unused large one; a prefix with ``a`` small and ``b`` large symbols left
    has ``(a+b)!/a!`` completions.
    """
    r = np.asarray(ranks, dtype=np.int64).copy()
    count = len(r)
    small = n - m

    comp = np.array([[math.factorial(a + b) // math.factorial(a) for b in range(m + 1)] for a in range(small + 1)],
                    dtype=np.int64)

    out = np.empty((count, n), dtype=np.int64)
    used_small = np.zeros(count, dtype=np.int64)
    avail = np.ones((count, m), dtype=bool)
    rows = np.arange(count)
    for i in range(n):
        left_small = small - used_small
        left_large = avail.sum(axis=1)
        done = np.zeros(count, dtype=bool)
        take_small = left_small > 0
        c_small = np.where(take_small, comp[np.maximum(left_small - 1, 0), left_large], 0)
        pick = take_small & (r < c_small)
        out[pick, i] = used_small[pick]
        used_small += pick
        done |= pick
        r -= np.where(take_small & ~pick, c_small, 0)
        c_large = np.where(left_large > 0, comp[left_small, np.maximum(left_large - 1, 0)], 0)
        for j in range(m):
            cand = ~done & avail[:, j]
            hit = cand & (r < c_large)
            out[hit, i] = small + j
            avail[rows[hit], j] = False
            done |= hit
            r -= np.where(cand & ~hit, c_large, 0)
    return out


@dataclass(frozen=True)
class SearchSpace:
    """A finite, ordered set of permutations that searches draw from."""

    kind: str
    n: int
    m: int = 0
    positions: tuple[int, ...] = ()

    @classmethod
    def full(cls, n: int) -> SearchSpace:
        return cls("full", n)

    @classmethod
    def restricted_sorted(cls, n: int, m: int) -> SearchSpace:
        if not 0 <= m <= n:
            raise DomainError(f"need 0 <= m <= n, got m={m}, n={n}")
        return cls("restricted_sorted", n, m)

    @classmethod
    def fixed_positions(cls, n: int, positions) -> SearchSpace:
        """``positions[i]`` (0-based) holds symbol ``n - m + i``."""
        positions = tuple(int(p) for p in positions)
        if len(set(positions)) != len(positions):
            raise DomainError("fixed positions must be distinct")
        if any(not 0 <= p < n for p in positions):
            raise DomainError(f"positions must lie in 0..{n - 1}")
        return cls("fixed_positions", n, len(positions), positions)

    @property
    def size(self) -> int:
        if self.kind == "full":
            return math.factorial(self.n)
        if self.kind == "restricted_sorted":
            return math.factorial(self.n) // math.factorial(self.n - self.m)
        return math.factorial(self.n - self.m)

    @property
    def restriction_m(self) -> int | None:
        return self.m if self.kind == "restricted_sorted" else None

    def describe(self) -> str:
        if self.kind == "full":
            return f"full(n={self.n})"
        if self.kind == "restricted_sorted":
            return f"S(n={self.n},m={self.m})"
        return f"fixed(n={self.n},pos={','.join(str(p + 1) for p in self.positions)})"

    def unrank(self, ranks) -> np.ndarray:
        ranks = np.atleast_1d(np.asarray(ranks, dtype=np.int64))
        n, m = self.n, self.m
        if self.kind == "full":
            return _lehmer_unrank(ranks, np.arange(n))
        if self.kind == "restricted_sorted":
            return _restricted_unrank(ranks, n, m)
        out = np.full((len(ranks), n), -1, dtype=np.int64)
        out[:, list(self.positions)] = np.arange(n - m, n)
        out[out < 0] = _lehmer_unrank(ranks, np.arange(n - m)).ravel()
        return out

    def contains(self, table) -> np.ndarray:
        table = np.atleast_2d(np.asarray(table))
        if table.shape[1] != self.n:
            return np.zeros(len(table), dtype=bool)
        ok = (np.sort(table, axis=1) == np.arange(self.n)).all(axis=1)
        if self.kind == "restricted_sorted":
            ok &= in_restricted(table, self.m)
        elif self.kind == "fixed_positions":
            for i, p in enumerate(self.positions):
                ok &= table[:, p] == self.n - self.m + i
        return ok

    def members(self) -> np.ndarray:
        return self.unrank(np.arange(self.size))


def _check_space(space: SearchSpace) -> None:
    if space.size > MAX_SPACE:
        raise DomainError(
            f"{space.describe()} has {space.size:.3e} members (limit {MAX_SPACE:.0e}); "
            "search a restricted space (S_{n,m}) or fixed positions instead"
        )


def _seed_sequence(rng_seed) -> np.random.SeedSequence:
    return np.random.SeedSequence(rng_seed)


def random_greedy(
    space: SearchSpace,
    d: int,
    seed_count: int,
    rng_seed=0,
    draw_budget: int | None = None,
) -> PermArray:
    """Random seeding followed by a lexicographic greedy sweep.

    First, uniformly random members are drawn and kept when at distance
    >= ``d`` from everything kept so far, until ``seed_count`` are kept or
    ``draw_budget`` draws have failed (default ``50 * seed_count``).  Then
    every member of the space is visited in order and added when compatible.
    """
    if d < 1:
        raise DomainError("d must be >= 1")
    if seed_count < 0:
        raise DomainError("seed_count must be >= 0")
    _check_space(space)
    rng = np.random.Generator(np.random.PCG64(_seed_sequence(rng_seed)))
    budget = 50 * seed_count if draw_budget is None else draw_budget
    size = space.size

    kept_rows: list[np.ndarray] = []
    kept_sigs: list[np.ndarray] = []
    failures = 0
    while len(kept_rows) < seed_count and failures < budget:
        row = space.unrank(rng.integers(size, size=1))
        sig = order_signatures(row)
        if kept_sigs and distances_to(np.vstack(kept_sigs), sig[0]).min() < d:
            failures += 1
            continue
        kept_rows.append(row[0])
        kept_sigs.append(sig)
    n_seeded = len(kept_rows)

    start = 0
    while start < size:
        n_words = 1 + (space.n * (space.n - 1) // 2) // 64
        step = int(min(size - start, max(1024, _CHUNK_CELLS // (n_words * max(1, len(kept_rows))))))
        chunk = space.unrank(np.arange(start, start + step))
        sigs = order_signatures(chunk)
        if kept_sigs:
            ok = signature_distances(sigs, np.vstack(kept_sigs)).min(axis=1) >= d
        else:
            ok = np.ones(len(chunk), dtype=bool)
        idx = np.flatnonzero(ok)
        while len(idx):
            i = idx[0]
            kept_rows.append(chunk[i])
            kept_sigs.append(sigs[i : i + 1])
            rest = idx[1:]
            idx = rest[distances_to(sigs[rest], sigs[i]) >= d]
        start += step

    result = PermArray(
        np.array(kept_rows, dtype=np.int64).reshape(-1, space.n),
        n=space.n,
        claimed_d=d,
        restriction_m=space.restriction_m,
        provenance=(
            f"random_greedy:{space.describe()}:d={d}:seeds={seed_count}:seeded={n_seeded}"
            f":rng={RNG_NAME}({rng_seed})"
        ),
    )
    _self_certify(result, space, d)
    return result


def _self_certify(result: PermArray, space: SearchSpace, d: int) -> None:
    if len(result) and not space.contains(result.table).all():
        raise AssertionError(f"search emitted members outside {space.describe()}")
    if len(result) >= 2:
        report = certify(result, d)
        if not report.passed:
            raise AssertionError(f"search output failed certification: {report}")


def _restart_seed(rng_seed, i: int):
    return rng_seed if i == 0 else [int(rng_seed), i]


def best_of_restarts(
    space: SearchSpace,
    d: int,
    restarts: int,
    rng_seed: int = 0,
    schedule=DEFAULT_SCHEDULE,
    threads: int | None = None,
) -> PermArray:
    """Largest array over ``restarts`` independent random_greedy runs.

    Restart ``i`` uses ``schedule[i % len(schedule)]`` random seeds and its own
    generator stream (restart 0 uses ``rng_seed`` itself, so a single restart is
    exactly ``random_greedy``).  Ties go to the earliest restart.
    """
    if restarts < 1:
        raise DomainError("restarts must be >= 1")
    schedule = tuple(schedule)

    def run(i):
        return random_greedy(space, d, schedule[i % len(schedule)], _restart_seed(rng_seed, i))

    workers = min(restarts, threads or default_threads())
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(restarts)))
    else:
        results = [run(i) for i in range(restarts)]
    best_i = max(range(restarts), key=lambda i: (len(results[i]), -i))
    best = results[best_i]
    return best.with_meta(
        provenance=f"best_of_restarts:restarts={restarts}:best={best_i}:rng={RNG_NAME}({rng_seed}):"
        f"schedule={','.join(map(str, schedule))}|{best.provenance}"
    )


def pnmd_search(n: int, m: int, d: int, budget: int = 100, rng_seed: int = 0,
                schedule=DEFAULT_SCHEDULE, threads: int | None = None) -> PermArray:
    """Best (n, m, d)-array found by random-greedy restarts over S_{n,m}."""
    if not 1 <= m < n:
        raise DomainError(f"need 1 <= m < n, got m={m}, n={n}")
    return best_of_restarts(SearchSpace.restricted_sorted(n, m), d, budget, rng_seed, schedule, threads)


# Exact maximum clique: branch and bound with a greedy-coloring bound over
# bitset-encoded candidate sets (vertices relabeled in degeneracy order).


def _degeneracy_order(adj: list[int], count: int) -> list[int]:
    """Vertices by repeatedly removing a minimum-degree vertex; removal order reversed."""
    degree = [bin(a).count("1") for a in adj]
    alive = (1 << count) - 1
    removed = []
    for _ in range(count):
        v = min((u for u in range(count) if alive >> u & 1), key=lambda u: (degree[u], u))
        removed.append(v)
        alive &= ~(1 << v)
        rest = adj[v] & alive
        while rest:
            low = rest & -rest
            degree[low.bit_length() - 1] -= 1
            rest ^= low
    return removed[::-1]


def max_clique(adj_matrix: np.ndarray) -> list[int]:
    """Indices of a maximum clique of an undirected graph given as a bool matrix."""
    count = len(adj_matrix)
    if count == 0:
        return []
    raw = [int("".join("1" if b else "0" for b in row[::-1]), 2) for row in adj_matrix.astype(bool)]
    order = _degeneracy_order(raw, count)
    label = {v: i for i, v in enumerate(order)}
    adj = [0] * count
    for v in range(count):
        bits = 0
        rest = raw[v]
        while rest:
            low = rest & -rest
            bits |= 1 << label[low.bit_length() - 1]
            rest ^= low
        adj[label[v]] = bits

    best: list[int] = []

    def color_sort(cand: int):
        verts, colors = [], []
        color = 0
        uncolored = cand
        while uncolored:
            color += 1
            avail = uncolored
            while avail:
                low = avail & -avail
                v = low.bit_length() - 1
                avail &= ~adj[v] & ~low
                uncolored &= ~low
                verts.append(v)
                colors.append(color)
        return verts, colors

    def expand(clique: list[int], cand: int):
        nonlocal best
        verts, colors = color_sort(cand)
        for v, color in zip(reversed(verts), reversed(colors)):
            if len(clique) + color <= len(best):
                return
            nxt = cand & adj[v]
            clique.append(v)
            if nxt:
                expand(clique, nxt)
            elif len(clique) > len(best):
                best = list(clique)
            clique.pop()
            cand &= ~(1 << v)

    expand([], (1 << count) - 1)
    return sorted(order[v] for v in best)


def clique_exact(space: SearchSpace, d: int, guard: int = CLIQUE_GUARD) -> PermArray:
    """A maximum (n, d)-array inside ``space``, found by exact clique search."""
    if d < 1:
        raise DomainError("d must be >= 1")
    if space.size > guard:
        raise DomainError(f"{space.describe()} has {space.size} members; clique guard is {guard}")
    members = space.members()
    sigs = order_signatures(members)
    adj = signature_distances(sigs, sigs) >= d
    np.fill_diagonal(adj, False)
    chosen = max_clique(adj)
    result = PermArray(
        members[chosen],
        n=space.n,
        claimed_d=d,
        restriction_m=space.restriction_m,
        provenance=f"clique_exact:{space.describe()}:d={d}:optimum={len(chosen)}",
    )
    _self_certify(result, space, d)
    return result
