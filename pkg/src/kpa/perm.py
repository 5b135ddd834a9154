"""Permutations in one-line notation and the Kendall-tau metric.

Symbols are 0-based: a permutation of length ``n`` is a rearrangement of
``0, 1, ..., n-1``.  The Kendall-tau distance between two permutations is the
minimum number of adjacent transpositions needed to turn one into the other,
which equals the number of symbol pairs whose relative order differs.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence
from functools import lru_cache
from itertools import combinations

import numpy as np

MAX_N = 64
BFS_MAX_N = 8


class DomainError(ValueError):
    """Raised when an operation is called outside its domain."""


class Permutation:
    """An immutable permutation of ``0..n-1`` stored as its image sequence."""

    __slots__ = ("_symbols",)

    def __init__(self, symbols: Iterable[int]):
        syms = tuple(int(s) for s in symbols)
        n = len(syms)
        if not 1 <= n <= MAX_N:
            raise DomainError(f"permutation length must be in [1, {MAX_N}], got {n}")
        if sorted(syms) != list(range(n)):
            raise DomainError(f"{syms} is not a permutation of 0..{n - 1}")
        object.__setattr__(self, "_symbols", syms)

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(range(n))

    @classmethod
    def reversal(cls, n: int) -> Permutation:
        return cls(range(n - 1, -1, -1))

    @classmethod
    def parse(cls, text: str, one_based: bool = False) -> Permutation:
        """Parse whitespace-separated symbols, e.g. ``"0 5 3 1 4 6 2 7"``."""
        vals = [int(tok) for tok in text.replace(",", " ").split()]
        if one_based:
            vals = [v - 1 for v in vals]
        return cls(vals)

    @property
    def symbols(self) -> tuple[int, ...]:
        return self._symbols

    @property
    def n(self) -> int:
        return len(self._symbols)

    def __len__(self) -> int:
        return len(self._symbols)

    def __getitem__(self, i):
        return self._symbols[i]

    def __iter__(self):
        return iter(self._symbols)

    def __eq__(self, other):
        if isinstance(other, Permutation):
            return self._symbols == other._symbols
        return NotImplemented

    def __lt__(self, other: Permutation) -> bool:
        return self._symbols < other._symbols

    def __hash__(self):
        return hash(self._symbols)

    def __repr__(self):
        return f"Permutation({list(self._symbols)})"

    def __str__(self):
        return " ".join(map(str, self._symbols))

    def positions(self) -> tuple[int, ...]:
        """Position of each symbol, i.e. the inverse permutation as a tuple."""
        pos = [0] * self.n
        for i, s in enumerate(self._symbols):
            pos[s] = i
        return tuple(pos)


def _check_same_n(p: Permutation, q: Permutation) -> None:
    if p.n != q.n:
        raise DomainError(f"length mismatch: {p.n} != {q.n}")


def _merge_count(seq: list[int]) -> tuple[list[int], int]:
    if len(seq) <= 1:
        return seq, 0
    mid = len(seq) // 2
    left, inv_l = _merge_count(seq[:mid])
    right, inv_r = _merge_count(seq[mid:])
    merged = []
    inv = inv_l + inv_r
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            # every remaining left element is greater than right[j]
            inv += len(left) - i
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    return merged, inv


def inversion_count(seq: Sequence[int]) -> int:
    """Number of pairs ``i < j`` with ``seq[i] > seq[j]``, in O(n log n)."""
    return _merge_count(list(seq))[1]


def kendall_distance(sigma: Permutation, pi: Permutation) -> int:
    """Kendall-tau distance: minimum number of adjacent swaps from sigma to pi.

    ``pi`` is relabeled by the positions of its symbols within ``sigma``; the
    inversions of that sequence are exactly the discordant symbol pairs.
    """
    _check_same_n(sigma, pi)
    pos_in_sigma = sigma.positions()
    return inversion_count([pos_in_sigma[s] for s in pi.symbols])


@lru_cache(maxsize=None)
def bfs_distance_table(n: int) -> dict[tuple[int, ...], int]:
    """Distances from the identity to every permutation of ``n`` symbols by BFS."""
    if not 1 <= n <= BFS_MAX_N:
        raise DomainError(f"BFS oracle refuses n > {BFS_MAX_N} (got {n})")
    start = tuple(range(n))
    dist = {start: 0}
    frontier = deque([start])
    while frontier:
        cur = frontier.popleft()
        for i in range(n - 1):
            nxt = cur[:i] + (cur[i + 1], cur[i]) + cur[i + 2:]
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                frontier.append(nxt)
    return dist


def bfs_distance_oracle(sigma: Permutation, pi: Permutation) -> int:
    """Exact distance by breadth-first search over adjacent transpositions.

    Swaps act on positions and commute with renaming symbols, so renaming by
    ``sigma``'s positions moves ``sigma`` to the identity without changing the
    distance; one BFS from the identity per ``n`` then serves every pair.
    """
    _check_same_n(sigma, pi)
    if sigma.n > BFS_MAX_N:
        raise DomainError(f"BFS oracle refuses n > {BFS_MAX_N} (got {sigma.n})")
    pos = sigma.positions()
    return bfs_distance_table(sigma.n)[tuple(pos[s] for s in pi.symbols)]


def bfs_pair_distance(sigma: Permutation, pi: Permutation) -> int:
    """BFS from ``sigma`` until ``pi`` is reached; no relabeling."""
    _check_same_n(sigma, pi)
    n = sigma.n
    if n > BFS_MAX_N:
        raise DomainError(f"BFS oracle refuses n > {BFS_MAX_N} (got {n})")
    start, goal = sigma.symbols, pi.symbols
    if start == goal:
        return 0
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        cur, dist = frontier.popleft()
        for i in range(n - 1):
            nxt = cur[:i] + (cur[i + 1], cur[i]) + cur[i + 2:]
            if nxt == goal:
                return dist + 1
            if nxt not in seen:
                seen.add(nxt)
                frontier.append((nxt, dist + 1))
    raise AssertionError("adjacent transpositions generate the symmetric group")


def inverse(p: Permutation) -> Permutation:
    return Permutation(p.positions())


def compose(p: Permutation, q: Permutation) -> Permutation:
    """``compose(p, q)(i) == p(q(i))``."""
    _check_same_n(p, q)
    return Permutation(p[q[i]] for i in range(p.n))


def parity(p: Permutation) -> str:
    """``"even"`` or ``"odd"`` by the inversion count relative to the identity."""
    return "odd" if inversion_count(p.symbols) % 2 else "even"


def max_distance(n: int) -> int:
    return n * (n - 1) // 2


# Vectorized machinery.  Each permutation is mapped to the bit vector of its
# pairwise symbol orders (bit for pair a < b set iff a precedes b).  The
# Kendall-tau distance is then the Hamming distance of these vectors, so a
# block of distances is an XOR plus a popcount.


def as_table(perms) -> np.ndarray:
    """Stack permutations (or symbol sequences) into an ``(N, n)`` int array."""
    if isinstance(perms, np.ndarray):
        return np.ascontiguousarray(perms, dtype=np.int64).reshape(len(perms), -1)
    rows = [p.symbols if isinstance(p, Permutation) else tuple(p) for p in perms]
    if not rows:
        return np.zeros((0, 0), dtype=np.int64)
    return np.asarray(rows, dtype=np.int64)


_PAIR_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _PAIR_CACHE:
        pairs = np.array(list(combinations(range(n), 2)), dtype=np.int64).reshape(-1, 2)
        _PAIR_CACHE[n] = (pairs[:, 0], pairs[:, 1])
    return _PAIR_CACHE[n]


def order_signatures(table: np.ndarray) -> np.ndarray:
    """Pair-order bit vectors of each row, packed into ``uint64`` words."""
    table = np.asarray(table, dtype=np.int64)
    count, n = table.shape
    pos = np.empty_like(table)
    rows = np.arange(count)[:, None]
    pos[rows, table] = np.arange(n)[None, :]
    lo, hi = _pairs(n)
    bits = pos[:, lo] < pos[:, hi]
    n_words = max(1, -(-len(lo) // 64))
    padded = np.zeros((count, n_words * 64), dtype=bool)
    padded[:, : len(lo)] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(np.uint64).reshape(count, n_words)


def signature_distances(sigs_a: np.ndarray, sigs_b: np.ndarray) -> np.ndarray:
    """All distances between two signature blocks, shape ``(len(a), len(b))``."""
    x = np.bitwise_xor(sigs_a[:, None, :], sigs_b[None, :, :])
    return np.bitwise_count(x).sum(axis=2, dtype=np.int64)


def distances_to(sigs: np.ndarray, one: np.ndarray) -> np.ndarray:
    """Distances from every row of ``sigs`` to the single signature ``one``."""
    return np.bitwise_count(np.bitwise_xor(sigs, one[None, :])).sum(axis=1, dtype=np.int64)


def table_parities(table: np.ndarray) -> np.ndarray:
    """Inversion parity (0 even, 1 odd) of every row."""
    table = np.asarray(table, dtype=np.int64)
    n = table.shape[1]
    lo, hi = _pairs(n)
    return ((table[:, lo] > table[:, hi]).sum(axis=1) % 2).astype(np.int8)
