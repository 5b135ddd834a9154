"""Permutation arrays and their exact certification.

A permutation array (PA) is a set of permutations of the same length.  It is
an ``(n, d)``-PA when every pair is at Kendall-tau distance at least ``d``, and
an ``(n, m, d)``-array when, in addition, every member keeps its ``n - m``
smallest symbols in increasing order.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .perm import (
    DomainError,
    Permutation,
    as_table,
    max_distance,
    order_signatures,
    signature_distances,
)

log = logging.getLogger(__name__)

LARGE_ARRAY = 100_000
_BLOCK_CELLS = 1 << 22


def default_threads() -> int:
    env = os.environ.get("KPA_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


class PermArray:
    """A deduplicated, order-preserving set of permutations of one length.

    Members are held as an ``(N, n)`` integer table.  Duplicate rows are
    dropped (first occurrence wins) and counted in ``duplicates``.
    ``origins`` optionally records, per member, where it came from (for
    example the representative index and group element of an orbit).
    """

    def __init__(
        self,
        perms,
        n: int | None = None,
        claimed_d: int | None = None,
        restriction_m: int | None = None,
        provenance: str = "",
        origins: list | None = None,
    ):
        table = as_table(perms)
        if table.size == 0:
            if n is None:
                raise DomainError("empty array needs an explicit n")
            table = np.zeros((0, n), dtype=np.int64)
        if n is not None and table.shape[1] != n:
            raise DomainError(f"members have length {table.shape[1]}, expected {n}")
        n = table.shape[1]
        if len(table) and not (np.sort(table, axis=1) == np.arange(n)).all():
            raise DomainError("every member must be a permutation of 0..n-1")
        _, first = np.unique(table, axis=0, return_index=True)
        keep = np.sort(first)
        self.duplicates = len(table) - len(keep)
        self.table = table[keep]
        self.table.setflags(write=False)
        if origins is not None:
            origins = [origins[i] for i in keep]
        self.origins = origins
        self.n = n
        self.claimed_d = claimed_d
        self.restriction_m = restriction_m
        self.provenance = provenance

    def __len__(self) -> int:
        return len(self.table)

    def __iter__(self):
        return (Permutation(row) for row in self.table.tolist())

    def __contains__(self, perm) -> bool:
        row = np.asarray(perm.symbols if isinstance(perm, Permutation) else perm)
        return bool((self.table == row).all(axis=1).any())

    def __repr__(self):
        return (
            f"PermArray(n={self.n}, size={len(self)}, claimed_d={self.claimed_d}, "
            f"restriction_m={self.restriction_m}, provenance={self.provenance!r})"
        )

    @property
    def perms(self) -> list[Permutation]:
        return list(self)

    def as_set(self) -> set[tuple[int, ...]]:
        return set(map(tuple, self.table.tolist()))

    def with_meta(self, **changes) -> PermArray:
        meta = dict(
            n=self.n,
            claimed_d=self.claimed_d,
            restriction_m=self.restriction_m,
            provenance=self.provenance,
            origins=self.origins,
        )
        meta.update(changes)
        return PermArray(self.table, **meta)

    def sorted(self) -> PermArray:
        order = np.lexsort(self.table.T[::-1])
        origins = [self.origins[i] for i in order] if self.origins is not None else None
        return PermArray(
            self.table[order],
            n=self.n,
            claimed_d=self.claimed_d,
            restriction_m=self.restriction_m,
            provenance=self.provenance,
            origins=origins,
        )


def in_restricted(table: np.ndarray, m: int) -> np.ndarray:
    """Row mask: the ``n - m`` smallest symbols appear in increasing position order."""
    table = np.asarray(table)
    if table.ndim == 1:
        table = table[None, :]
    n = table.shape[1]
    small = n - m
    if small <= 1:
        return np.ones(len(table), dtype=bool)
    pos = np.empty_like(table)
    pos[np.arange(len(table))[:, None], table] = np.arange(n)
    return (np.diff(pos[:, :small], axis=1) > 0).all(axis=1)


@dataclass
class CertReport:
    size: int
    min_distance: int
    witness_pair: tuple[int, int] | None
    restriction_ok: bool = True
    elapsed: float = 0.0
    duplicates: int = 0
    required_d: int | None = None
    passed: bool | None = None
    bad_members: list[int] = field(default_factory=list)

    @property
    def infinite(self) -> bool:
        return self.witness_pair is None

    def __str__(self):
        lines = [f"size={self.size}"]
        if self.witness_pair is None:
            lines.append("min_distance=inf (fewer than two members)")
        else:
            i, j = self.witness_pair
            lines.append(f"min_distance={self.min_distance} witness=({i}, {j})")
        lines.append(f"restriction_ok={self.restriction_ok}")
        if self.duplicates:
            lines.append(f"duplicates_dropped={self.duplicates}")
        if self.required_d is not None:
            lines.append(f"required_d={self.required_d} result={'PASS' if self.passed else 'FAIL'}")
        lines.append(f"elapsed={self.elapsed:.3f}s")
        return "\n".join(lines)


def _block_min(sigs: np.ndarray, start: int, stop: int):
    """Smallest distance between rows in [start, stop) and all later rows."""
    dist = signature_distances(sigs[start:stop], sigs[start:])
    rows = np.arange(stop - start)[:, None]
    cols = np.arange(len(sigs) - start)[None, :]
    dist = np.where(cols > rows, dist, np.iinfo(np.int64).max)
    flat = int(np.argmin(dist))
    i, j = divmod(flat, dist.shape[1])
    return int(dist[i, j]), start + i, start + j


def min_pairwise_distance(
    a: PermArray,
    threads: int | None = None,
    stop_below: int | None = None,
    allow_large: bool = False,
) -> CertReport:
    """Exact minimum distance over all unordered pairs, with a witness pair.

    With ``stop_below`` set, evaluation stops as soon as a pair closer than
    that floor is found; the reported minimum is then only an upper bound.
    """
    t0 = time.perf_counter()
    size = len(a)
    if size == 0:
        raise DomainError("cannot measure an empty array")
    if size > LARGE_ARRAY:
        if not allow_large:
            raise DomainError(
                f"{size} members means ~{size * size // 2:.2e} pair checks; "
                "pass allow_large=True (--allow-large) to proceed"
            )
        log.warning("certifying %d members pairwise", size)
    if size == 1:
        return CertReport(1, max_distance(a.n) + 1, None, elapsed=time.perf_counter() - t0,
                          duplicates=a.duplicates)

    sigs = order_signatures(a.table)
    step = max(1, _BLOCK_CELLS // (size * sigs.shape[1]))
    starts = list(range(0, size - 1, step))
    best = (np.iinfo(np.int64).max, -1, -1)

    def run(start):
        return _block_min(sigs, start, min(start + step, size - 1))

    workers = threads or default_threads()
    if workers > 1 and len(starts) > 1 and stop_below is None:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, starts))
        best = min(results)
    else:
        for start in starts:
            best = min(best, run(start))
            if stop_below is not None and best[0] < stop_below:
                break
    dist, i, j = best
    return CertReport(size, dist, (i, j), elapsed=time.perf_counter() - t0,
                      duplicates=a.duplicates)


def certify(a: PermArray, d: int, threads: int | None = None, allow_large: bool = False) -> CertReport:
    """Pass iff all pairs are at distance >= d and any restriction holds."""
    if d < 1:
        raise DomainError("d must be >= 1")
    report = min_pairwise_distance(a, threads=threads, allow_large=allow_large)
    if a.restriction_m is not None:
        mask = in_restricted(a.table, a.restriction_m)
        report.restriction_ok = bool(mask.all())
        report.bad_members = np.flatnonzero(~mask).tolist()
    report.required_d = d
    report.passed = report.min_distance >= d and report.restriction_ok
    return report
