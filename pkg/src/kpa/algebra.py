"""Symbol arithmetic over Z_n and GF(p^k), affine automorphisms, orbit expansion.

An automorphism ``(a, b, c)`` maps a permutation ``p`` (viewed as a function on
the symbol set) to ``x -> a * p(x + b) + c``.  Field elements are identified
with symbols by reading the coefficient vector ``(c_{k-1}, ..., c_0)`` as a
base-``p`` number, so symbol ``3`` in GF(9) is the polynomial ``x``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .perm import DomainError, Permutation, as_table, order_signatures
from .verify import PermArray

SHIFT_VALUE = "shift_value"
SHIFT_ARG = "shift_arg"
SCALE_VALUE = "scale_value"
ALL_OPS = frozenset({SHIFT_VALUE, SHIFT_ARG, SCALE_VALUE})

_OP_LETTERS = {"a": SCALE_VALUE, "b": SHIFT_ARG, "c": SHIFT_VALUE}

# Monic, low-to-high coefficients.  These are the labelings under which the
# published representative lists certify (see tests/test_golden_orbits.py).
DEFAULT_POLYS = {8: (1, 0, 1, 1), 9: (2, 2, 1)}

MATRIX_CELLS = 10**8


def parse_ops(text: str) -> frozenset[str]:
    """``"ac"`` -> ``{scale_value, shift_value}``."""
    try:
        return frozenset(_OP_LETTERS[ch] for ch in text.strip().lower())
    except KeyError as exc:
        raise DomainError(f"unknown operation letter {exc} in {text!r}; use a, b, c") from None


def prime_power(q: int) -> tuple[int, int] | None:
    """``(p, k)`` with ``p**k == q`` and ``p`` prime, or None."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            k = 0
            while q % p == 0:
                q //= p
                k += 1
            return (p, k) if q == 1 else None
    return None


def _poly_mod(num: list[int], den: tuple[int, ...], p: int) -> list[int]:
    num = list(num)
    inv_lead = pow(den[-1], -1, p)
    for deg in range(len(num) - 1, len(den) - 2, -1):
        coef = num[deg] * inv_lead % p
        if coef:
            shift = deg - (len(den) - 1)
            for i, dc in enumerate(den):
                num[shift + i] = (num[shift + i] - coef * dc) % p
    return num[: len(den) - 1] or [0]


def is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..k//2 over Z_p."""
    k = len(poly) - 1
    if k < 1 or poly[-1] % p == 0:
        return False
    for deg in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            divisor = tuple(low) + (1,)
            if not any(_poly_mod(list(poly), divisor, p)):
                return False
    return True


def first_irreducible(p: int, k: int) -> tuple[int, ...]:
    for low in itertools.product(range(p), repeat=k):
        poly = tuple(low) + (1,)
        if is_irreducible(poly, p):
            return poly
    raise AssertionError("irreducible polynomials exist for every degree")


def parse_poly(text: str) -> tuple[int, ...]:
    """Parse high-to-low coefficients, e.g. ``"1,0,1,1"`` or ``"1011"`` for x^3+x+1."""
    text = text.strip()
    parts = text.split(",") if "," in text else list(text)
    coeffs = tuple(int(c) for c in parts)
    return tuple(reversed(coeffs))


@dataclass(frozen=True)
class SymbolDomain:
    """The arithmetic structure on symbols ``0..n-1``."""

    kind: str
    n: int
    p: int = 0
    k: int = 0
    poly: tuple[int, ...] = ()
    allow_ring_mul: bool = False

    @classmethod
    def ring(cls, n: int, allow_mul: bool = False) -> SymbolDomain:
        if n < 1:
            raise DomainError("ring order must be positive")
        return cls("ring_mod_n", n, allow_ring_mul=allow_mul)

    @classmethod
    def field(cls, q: int, poly: tuple[int, ...] | None = None) -> SymbolDomain:
        pk = prime_power(q)
        if pk is None:
            raise DomainError(f"GF({q}) does not exist: {q} is not a prime power")
        p, k = pk
        if poly is None:
            poly = DEFAULT_POLYS.get(q) or ((0, 1) if k == 1 else first_irreducible(p, k))
        poly = tuple(int(c) % p for c in poly)
        if len(poly) != k + 1 or poly[-1] != 1:
            raise DomainError(f"GF({q}) needs a monic polynomial of degree {k}")
        if k > 1 and not is_irreducible(poly, p):
            raise DomainError(f"{poly_str(poly)} is reducible over Z_{p}")
        return cls("field_gf", q, p, k, poly)

    @property
    def is_field(self) -> bool:
        return self.kind == "field_gf"

    def digits(self, x: int) -> list[int]:
        return [(x // self.p**i) % self.p for i in range(self.k)]

    def from_digits(self, digits) -> int:
        return sum(int(c) * self.p**i for i, c in enumerate(digits))

    @property
    def add_table(self) -> np.ndarray:
        return _tables(self)[0]

    @property
    def mul_table(self) -> np.ndarray:
        return _tables(self)[1]

    def __str__(self):
        if self.is_field:
            return f"GF({self.n}) mod {poly_str(self.poly)}"
        return f"Z_{self.n}"


def poly_str(poly: tuple[int, ...]) -> str:
    terms = []
    for deg in range(len(poly) - 1, -1, -1):
        c = poly[deg]
        if not c:
            continue
        mono = "" if deg == 0 else ("x" if deg == 1 else f"x^{deg}")
        coef = "" if (c == 1 and deg) else str(c)
        terms.append(coef + mono)
    return "+".join(terms) or "0"


_TABLE_CACHE: dict[SymbolDomain, tuple[np.ndarray, np.ndarray]] = {}


def _slow_add(d: SymbolDomain, x: int, y: int) -> int:
    if not d.is_field:
        return (x + y) % d.n
    return d.from_digits((a + b) % d.p for a, b in zip(d.digits(x), d.digits(y)))


def _slow_mul(d: SymbolDomain, x: int, y: int) -> int:
    if not d.is_field:
        return (x * y) % d.n
    xs, ys = d.digits(x), d.digits(y)
    prod = [0] * (2 * d.k - 1)
    for i, a in enumerate(xs):
        for j, b in enumerate(ys):
            prod[i + j] = (prod[i + j] + a * b) % d.p
    return d.from_digits(_poly_mod(prod, d.poly, d.p))


def _tables(d: SymbolDomain) -> tuple[np.ndarray, np.ndarray]:
    if d not in _TABLE_CACHE:
        idx = range(d.n)
        add = np.array([[_slow_add(d, x, y) for y in idx] for x in idx], dtype=np.int64)
        mul = np.array([[_slow_mul(d, x, y) for y in idx] for x in idx], dtype=np.int64)
        _TABLE_CACHE[d] = (add, mul)
    return _TABLE_CACHE[d]


def _check_symbol(d: SymbolDomain, *xs: int) -> None:
    for x in xs:
        if not 0 <= x < d.n:
            raise DomainError(f"symbol {x} outside 0..{d.n - 1}")


def domain_add(d: SymbolDomain, x: int, y: int) -> int:
    _check_symbol(d, x, y)
    return int(d.add_table[x, y])


def domain_mul(d: SymbolDomain, x: int, y: int) -> int:
    _check_symbol(d, x, y)
    if not d.is_field and not d.allow_ring_mul:
        raise DomainError(f"multiplication on {d} is disabled; use a field or allow_mul=True")
    return int(d.mul_table[x, y])


@dataclass(frozen=True)
class Automorphism:
    """``x -> a * p(x + b) + c``; ``a == 1``, ``b == 0``, ``c == 0`` switch a part off."""

    a: int = 1
    b: int = 0
    c: int = 0

    @property
    def active(self) -> frozenset[str]:
        ops = set()
        if self.a != 1:
            ops.add(SCALE_VALUE)
        if self.b:
            ops.add(SHIFT_ARG)
        if self.c:
            ops.add(SHIFT_VALUE)
        return frozenset(ops)

    def validate(self, d: SymbolDomain) -> None:
        _check_symbol(d, self.a, self.b, self.c)
        if self.a == 0:
            raise DomainError("scaling by zero is not a permutation")
        if self.a != 1 and not d.is_field and not d.allow_ring_mul:
            raise DomainError(f"scaling requires a field, got {d}")
        if self.a != 1 and not d.is_field and np.gcd(self.a, d.n) != 1:
            raise DomainError(f"{self.a} is not a unit in {d}")

    def then(self, other: Automorphism, d: SymbolDomain) -> Automorphism:
        """The automorphism equal to applying ``self`` first and ``other`` second."""
        add, mul = d.add_table, d.mul_table
        return Automorphism(
            int(mul[other.a, self.a]),
            int(add[self.b, other.b]),
            int(add[mul[other.a, self.c], other.c]),
        )


def apply_automorphism(d: SymbolDomain, g: Automorphism, p: Permutation) -> Permutation:
    if p.n != d.n:
        raise DomainError(f"permutation length {p.n} does not match {d}")
    g.validate(d)
    add, mul = d.add_table, d.mul_table
    sym = np.asarray(p.symbols)
    args = add[np.arange(d.n), g.b]
    return Permutation(add[mul[g.a, sym[args]], g.c].tolist())


def group_elements(d: SymbolDomain, ops) -> list[Automorphism]:
    """Elements of the group generated by ``ops``, ordered by a, then b, then c."""
    ops = frozenset(ops)
    if not ops <= ALL_OPS:
        raise DomainError(f"unknown operations {set(ops - ALL_OPS)}")
    if SCALE_VALUE in ops and not d.is_field:
        raise DomainError(f"scale_value requires a field, got {d}")
    scales = range(1, d.n) if SCALE_VALUE in ops else [1]
    args = range(d.n) if SHIFT_ARG in ops else [0]
    shifts = range(d.n) if SHIFT_VALUE in ops else [0]
    return [Automorphism(a, b, c) for a in scales for b in args for c in shifts]


def orbit_table(d: SymbolDomain, group: list[Automorphism], reps: np.ndarray) -> np.ndarray:
    """Images of every rep under every group element, shape ``(R, G, n)``."""
    reps = np.asarray(reps, dtype=np.int64).reshape(-1, d.n)
    add, mul = d.add_table, d.mul_table
    a = np.array([g.a for g in group])
    b = np.array([g.b for g in group])
    c = np.array([g.c for g in group])
    args = add[np.arange(d.n)[None, :], b[:, None]]  # (G, n)
    vals = reps[:, args]  # (R, G, n)
    return add[mul[a[None, :, None], vals], c[None, :, None]]


def expand_orbits(d: SymbolDomain, reps, ops) -> PermArray:
    """Union of the orbits of ``reps``, first occurrence kept (rep-major order)."""
    rep_table = as_table(reps.table if isinstance(reps, PermArray) else reps)
    group = group_elements(d, ops)
    images = orbit_table(d, group, rep_table)
    origins = [(r, (g.a, g.b, g.c)) for r in range(len(rep_table)) for g in group]
    letters = "".join(k for k, v in sorted(_OP_LETTERS.items()) if v in frozenset(ops))
    return PermArray(
        images.reshape(-1, d.n),
        n=d.n,
        provenance=f"expand:{letters or 'id'}:{d}:reps={len(rep_table)}",
        origins=origins,
    )


def _candidates(d: SymbolDomain, group: list[Automorphism], ops) -> np.ndarray:
    """One member of each orbit: normalized so p(0)=0 (and p(1)=1 when scaling)."""
    n = d.n
    fixed = [0, 1] if SCALE_VALUE in ops and n > 1 else [0]
    rest = [s for s in range(n) if s not in fixed]
    cands = np.array([fixed + list(t) for t in itertools.permutations(rest)], dtype=np.int64)
    if SHIFT_ARG in ops:
        images = orbit_table(d, group, cands)
        # keep the lexicographically smallest member of each orbit
        keys = images @ (n ** np.arange(n - 1, -1, -1, dtype=np.int64))
        own = cands @ (n ** np.arange(n - 1, -1, -1, dtype=np.int64))
        cands = cands[keys.min(axis=1) == own]
    return cands


def rep_search(
    d: SymbolDomain,
    dist: int,
    ops,
    budget: int = 100,
    rng_seed: int = 0,
) -> PermArray:
    """Randomized greedy search for orbit representatives.

    Each of ``budget`` restarts visits the candidate representatives in a
    fresh random order and accepts a candidate when its whole orbit is free,
    internally at distance >= ``dist``, and at distance >= ``dist`` from every
    orbit accepted so far.  The largest accepted list is returned.
    """
    if dist < 1:
        raise DomainError("dist must be >= 1")
    ops = frozenset(ops)
    group = group_elements(d, ops)
    g_size = len(group)
    cands = _candidates(d, group, ops)
    images = orbit_table(d, group, cands)  # (C, G, n)
    n_cand = len(cands)
    sigs = order_signatures(images.reshape(-1, d.n)).reshape(n_cand, g_size, -1)

    ok = np.empty(n_cand, dtype=bool)
    chunk = max(1, (1 << 21) // (g_size * g_size))
    for s in range(0, n_cand, chunk):
        block = sigs[s : s + chunk]
        x = np.bitwise_count(block[:, :, None, :] ^ block[:, None, :, :]).sum(axis=3)
        x[:, np.arange(g_size), np.arange(g_size)] = dist
        ok[s : s + chunk] = (x >= dist).all(axis=(1, 2))
    usable = np.flatnonzero(ok)

    n_use = len(usable)
    flat_usable = sigs[usable].reshape(n_use * g_size, -1)
    rows: dict[int, np.ndarray] = {}

    def compatible(i: int) -> np.ndarray:
        # usable candidates whose whole orbit stays >= dist from the orbit of usable[i]
        if i not in rows:
            x = np.bitwise_count(flat_usable[None, :, :] ^ sigs[usable[i]][:, None, :]).sum(axis=2)
            rows[i] = (x.reshape(g_size, n_use, g_size) >= dist).all(axis=(0, 2))
        return rows[i]

    rng = np.random.Generator(np.random.PCG64(rng_seed))
    # Small instances: build the whole compatibility matrix and always take a
    # candidate with the fewest conflicts among those still available.
    dense = n_use * n_use * g_size * g_size <= MATRIX_CELLS
    conflicts = None
    if dense and n_use:
        conflicts = ~np.vstack([compatible(i) for i in range(n_use)])
    best: list[int] = []
    for _ in range(max(1, budget)):
        alive = np.ones(n_use, dtype=bool)
        chosen: list[int] = []
        if conflicts is not None:
            while alive.any():
                idx = np.flatnonzero(alive)
                deg = conflicts[np.ix_(idx, idx)].sum(axis=1)
                i = int(rng.choice(idx[deg == deg.min()]))
                chosen.append(i)
                alive &= ~conflicts[i]
        else:
            for i in rng.permutation(n_use):
                if alive[i]:
                    chosen.append(int(i))
                    alive &= compatible(int(i))
        if len(chosen) > len(best):
            best = chosen
    letters = "".join(k for k, v in sorted(_OP_LETTERS.items()) if v in ops)
    table = cands[np.sort(usable[best])] if best else np.zeros((0, d.n), dtype=np.int64)
    return PermArray(
        table,
        n=d.n,
        claimed_d=dist,
        provenance=f"rep_search:{letters}:{d}:budget={budget}:rng=PCG64({rng_seed})",
    )
