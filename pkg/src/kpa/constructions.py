"""Deterministic constructions of permutation arrays.

Every public function certifies its own output before returning it; a
construction that fails certification raises ``AssertionError`` because that
is a defect, not a user error.

Positions in docstrings are 1-based where they mirror the usual notation
(``{1, d+1, 2d+1, ...}``); arrays themselves are 0-based.
"""

from __future__ import annotations

import math
from collections.abc import Mapping

import numpy as np

from .perm import DomainError, table_parities
from .verify import PermArray, certify, in_restricted


def _emit(table, n: int, d: int, provenance: str, m: int | None = None) -> PermArray:
    result = PermArray(np.asarray(table, dtype=np.int64).reshape(-1, n), n=n, claimed_d=d,
                       restriction_m=m, provenance=provenance)
    if len(result) >= 2:
        report = certify(result, d)
        if not report.passed:
            raise AssertionError(f"{provenance} failed certification at d={d}: {report}")
    return result


def _require_certified(a: PermArray, d: int, what: str) -> None:
    if len(a) >= 2 and not certify(a, d).passed:
        raise DomainError(f"{what} is not certified at d={d}")


def from_placements(n: int, placements) -> np.ndarray:
    """Members of S_{n,m} from placements of the m largest symbols.

    ``placements[i]`` lists the 0-based positions of symbols ``n-m, ..., n-1``.
    """
    rows = []
    for place in placements:
        m = len(place)
        row = [-1] * n
        for i, p in enumerate(place):
            row[p] = n - m + i
        small = iter(range(n - m))
        rows.append([next(small) if v < 0 else v for v in row])
    return np.array(rows, dtype=np.int64).reshape(-1, n)


def halve_even(a: PermArray, d: int | None = None) -> PermArray:
    """Larger inversion-parity class of an odd-distance array; certified at d+1."""
    d = a.claimed_d if d is None else d
    if d is None:
        raise DomainError("halve_even needs the certified distance of its input")
    if d % 2 == 0:
        raise DomainError(f"input distance {d} is already even; use the array as is")
    _require_certified(a, d, "halve_even input")
    par = table_parities(a.table)
    even, odd = a.table[par == 0], a.table[par == 1]
    keep = even if len(even) >= len(odd) else odd
    return _emit(keep, a.n, d + 1, f"halve_even({a.provenance or 'input'})", a.restriction_m)


def insert_symbol(a: PermArray, d: int | None = None) -> PermArray:
    """Insert a new largest symbol at 1-based positions 1, d+1, 2d+1, ...; same d, n+1."""
    d = a.claimed_d if d is None else d
    if d is None or d < 1:
        raise DomainError("insert_symbol needs the certified distance of its input")
    _require_certified(a, d, "insert_symbol input")
    n = a.n
    rows = []
    for p in range(0, n + 1, d):
        for row in a.table.tolist():
            rows.append(row[:p] + [n] + row[p:])
    m = a.restriction_m + 1 if a.restriction_m is not None else None
    out = _emit(rows, n + 1, d, f"insert_symbol({a.provenance or 'input'})", m)
    assert len(out) == math.ceil((n + 1) / d) * len(a)
    return out


def _substitute(outer_row: list[int], inner_row: list[int], small: int) -> list[int]:
    return [inner_row[s] if s < small else s for s in outer_row]


def compose(outer: PermArray, inner: PermArray, d: int | None = None) -> PermArray:
    """Product construction: fill each outer member's sorted small symbols by each inner member."""
    d = outer.claimed_d if d is None else d
    m = outer.restriction_m
    if m is None:
        raise DomainError("outer array must carry restriction_m")
    if inner.n != outer.n - m:
        raise DomainError(f"inner must have n={outer.n - m}, got {inner.n}")
    if not in_restricted(outer.table, m).all():
        raise DomainError(f"outer members are not all in S_(n={outer.n},m={m})")
    _require_certified(outer, d, "outer array")
    _require_certified(inner, d, "inner array")
    small = inner.n
    rows = [_substitute(o, i, small) for o in outer.table.tolist() for i in inner.table.tolist()]
    out = _emit(rows, outer.n, d, f"compose({outer.provenance or 'outer'} x {inner.provenance or 'inner'})")
    assert len(out) == len(outer) * len(inner)
    return out


def large_symbol_placement(row, m: int) -> tuple[int, ...]:
    """0-based positions of the m largest symbols, in symbol order."""
    n = len(row)
    pos = {s: i for i, s in enumerate(row)}
    return tuple(pos[s] for s in range(n - m, n))


def compose_sum(outer: PermArray, inners: Mapping, d: int | None = None) -> PermArray:
    """Union of per-placement arrays, one for each member of an (n, m, d)-array.

    ``inners`` maps each outer member (as a tuple or Permutation) to an
    (n, d)-array whose m largest symbols sit exactly where they sit in that
    member.
    """
    d = outer.claimed_d if d is None else d
    m = outer.restriction_m
    if m is None:
        raise DomainError("outer array must carry restriction_m")
    _require_certified(outer, d, "outer array")
    by_key = {tuple(getattr(k, "symbols", k)): v for k, v in inners.items()}
    rows = []
    for tau in outer.table.tolist():
        inner = by_key.get(tuple(tau))
        if inner is None:
            raise DomainError(f"no inner array for outer member {tau}")
        if inner.n != outer.n:
            raise DomainError(f"inner array for {tau} has n={inner.n}, expected {outer.n}")
        want = large_symbol_placement(tau, m)
        for row in inner.table.tolist():
            if large_symbol_placement(row, m) != want:
                raise DomainError(f"inner member {row} does not match the placement of {tau}")
        _require_certified(inner, d, f"inner array for {tau}")
        rows.extend(inner.table.tolist())
    out = _emit(rows, outer.n, d, f"compose_sum({outer.provenance or 'outer'})")
    assert len(out) == sum(len(by_key[tuple(t)]) for t in outer.table.tolist())
    return out


def two_point_array(n: int, m: int) -> PermArray:
    """Identity and (n-1, n-2, ..., n-m, 0, 1, ..., n-m-1); distance m*n - m(m+1)/2."""
    if not 1 <= m < n:
        raise DomainError(f"need 1 <= m < n, got m={m}, n={n}")
    far = list(range(n - 1, n - m - 1, -1)) + list(range(n - m))
    d = m * n - m * (m + 1) // 2
    return _emit([list(range(n)), far], n, d, f"two_point_array(n={n},m={m})", m)


def three_array(n: int) -> PermArray:
    """Three members of S_{n,2} at distance n + floor(n/3) - 2, laid out as in the (9,2,10) example."""
    if n < 5:
        raise DomainError("three_array needs n >= 5")
    x = n // 3
    a, b = n - 2, n - 1  # the two largest symbols
    rest = list(range(n - 2))
    t1 = [a, b] + rest
    t2 = rest[: x - 1] + [b] + rest[x - 1:] + [a]
    t3 = rest[:x] + [a] + rest[x:] + [b]
    return _emit([t1, t2, t3], n, n + x - 2, f"three_array(n={n})", 2)


def five_array(n: int) -> PermArray:
    """Five members of S_{n,2} at distance n - 2."""
    if n < 6:
        raise DomainError("five_array needs n >= 6")
    k = n // 2
    last = n - 1
    # 0-based positions of (n-1, n) in 1-based symbol terms
    middle = (k - 1, k) if n % 2 == 0 else (k, k - 1)
    placements = [(0, 1), (last - 1, last), middle, (0, last), (last, 0)]
    return _emit(from_placements(n, placements), n, n - 2, f"five_array(n={n})", 2)


def _gap_string(n: int, a: int, b: int, first: int) -> tuple[int, int]:
    """Placement with ``a`` symbols before the first large symbol and ``b`` between."""
    p, q = a, a + b + 1
    return (p, q) if first == n - 2 else (q, p)


def pattern_d3(n: int) -> PermArray:
    """(n, 2, 3)-array from the two gap patterns.

    With ``a`` symbols before, ``b`` between and ``c = n-2-a-b`` after the two
    largest symbols: the smaller of the two comes first when ``a`` is even,
    the larger first when ``a`` is odd, and ``b`` runs over multiples of 3.
    """
    if n < 4:
        raise DomainError("pattern_d3 needs n >= 4")
    placements = []
    for b in range(0, n - 1, 3):
        for a in range(0, n - 1 - b):
            first = n - 2 if a % 2 == 0 else n - 1
            placements.append(_gap_string(n, a, b, first))
    return _emit(from_placements(n, placements), n, 3, f"pattern_d3(n={n})", 2)


def pattern_d4(n: int) -> PermArray:
    """(n, 2, 4)-array for odd n: a even, b = 0 mod 4 (smaller first) or b = 3 mod 4 (larger first)."""
    if n < 4 or n % 2 == 0:
        raise DomainError(f"pattern_d4 needs odd n >= 5, got {n}")
    placements = []
    for a in range(0, n - 1, 2):
        for b in range(0, n - 1 - a):
            if b % 4 == 0:
                placements.append(_gap_string(n, a, b, n - 2))
            elif b % 4 == 3:
                placements.append(_gap_string(n, a, b, n - 1))
    return _emit(from_placements(n, placements), n, 4, f"pattern_d4(n={n})", 2)


def pattern_d3_size(n: int) -> int:
    return n * (n + 1) // 6 if n % 3 != 1 else (n + 2) * (n - 1) // 6


def pattern_d4_size(n: int) -> int:
    if n % 4 == 1:
        k = (n - 1) // 4
        return 2 * k * k + k
    if n % 4 == 3:
        k = (n - 3) // 4
        return 2 * k * k + 3 * k + 1
    raise DomainError("pattern_d4 sizes are defined for odd n")
