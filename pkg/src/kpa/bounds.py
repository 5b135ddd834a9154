"""Lower-bound database with derivation traces.

A record states ``P(n,d) >= value`` (full arrays), ``P(n,m,d) >= value``
(restricted arrays, ``m`` set) or a pinned-placement bound (``positions`` set,
1-based, in the order printed by the source).  Every derived record names the
rule and antecedent record ids that produced it, so :func:`replay` can redo the
arithmetic.

Rules
-----
input      value taken as given
sum        sum of the antecedents (a repeated id counts repeatedly)
gen        restricted (n,m,d) bound times full (n-m,d) bound
halve      ceil(v/2), (n,d) -> (n,d+1) for odd d
insert     ceil((n+1)/d) * v, (n,d) -> (n+1,d); restricted (n,m,d) -> (n+1,m+1,d)
shrink     ceil(v/(n+1)), (n+1,d) -> (n,d)
pin        pinned placement bound from the free-symbol array: P_tau(n,d) >= P(n-m,d)
pad        P(n+1,m,d) >= P(n,m,d)  (prepend a new smallest symbol)
widen      P(n,m+1,d) >= P(n,m,d)  (S_{n,m} is a subset of S_{n,m+1})
reversal   P(n,d) >= 2 for d <= n(n-1)/2
prop8      P(n,m,d) >= 2 for d <= mn - m(m+1)/2
thm9a      P(n,2,d) >= 3 for n >= 5, d <= n + floor(n/3) - 2
thm9b      P(n,2,d) >= 5 for n >= 6, d <= n - 2
pattern3   P(n,2,3) >= pattern count
pattern4   P(n,2,4) >= pattern count, odd n
wzyg, bm   closed-form bounds for odd d = 2t+1 when n-2 is a prime power
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import deque
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .algebra import prime_power
from .constructions import pattern_d3_size, pattern_d4_size
from .perm import DomainError

PAPER_CLAIMED = "paper-claimed, not desk-certified"
CERTIFIED = "certified"
DERIVED = "derived"

M_MAX = 6

Cell = tuple[int, "int | None", int]


def label(n: int, d: int, m: int | None = None, positions=None) -> str:
    if positions:
        return f"P({n},{d};{','.join(map(str, positions))})"
    return f"P({n},{m},{d})" if m is not None else f"P({n},{d})"


@dataclass
class BoundRecord:
    id: str
    n: int
    d: int
    value: int | None
    m: int | None = None
    positions: tuple[int, ...] | None = None
    rule: str = "input"
    antecedents: tuple[str, ...] = ()
    note: str = ""
    provenance: str = PAPER_CLAIMED
    flags: list[str] = field(default_factory=list)
    kind: str = "cell"

    def __post_init__(self):
        self.positions = tuple(self.positions) if self.positions else None
        self.antecedents = tuple(self.antecedents)

    @property
    def cell(self) -> Cell | None:
        """Grid cell ``(n, m, d)`` this record bounds; None for pinned or sum-term records."""
        return None if self.kind == "term" else (self.n, self.m, self.d)

    @property
    def label(self) -> str:
        return label(self.n, self.d, self.m, self.positions)

    def to_json(self) -> str:
        data = asdict(self)
        data["positions"] = list(self.positions) if self.positions else None
        data["antecedents"] = list(self.antecedents)
        return json.dumps(data)

    @classmethod
    def from_dict(cls, data: dict) -> "BoundRecord":
        keys = cls.__dataclass_fields__
        return cls(**{k: v for k, v in data.items() if k in keys})


# closed forms -------------------------------------------------------------


def _formula_m(n: int, t: int) -> int:
    if n < 4 or t < 1:
        raise DomainError(f"need n >= 4 and t >= 1, got n={n}, t={t}")
    if prime_power(n - 2) is None:
        raise DomainError(f"n-2 = {n - 2} is not a prime power")
    return ((n - 2) ** (t + 1) - 1) // (n - 3)


def _formula_value(rule: str, n: int, t: int) -> int:
    m = _formula_m(n, t)
    denom = t * (t + 1) * m if rule == "bm" else (2 * t + 1) * m
    return math.factorial(n) // denom


def formula_bound_bm(n: int, t: int) -> BoundRecord:
    """floor(n! / (t(t+1)m)) with m = ((n-2)^(t+1) - 1)/(n-3); d = 2t+1."""
    return BoundRecord(f"{label(n, 2 * t + 1)}@bm", n, 2 * t + 1, _formula_value("bm", n, t),
                       rule="bm", provenance=DERIVED, note=f"t={t}")


def formula_bound_wzyg(n: int, t: int) -> BoundRecord:
    """floor(n! / ((2t+1)m)) with m = ((n-2)^(t+1) - 1)/(n-3); d = 2t+1."""
    return BoundRecord(f"{label(n, 2 * t + 1)}@wzyg", n, 2 * t + 1, _formula_value("wzyg", n, t),
                       rule="wzyg", provenance=DERIVED, note=f"t={t}")


def shrunk_formula_bound(n: int, t: int) -> BoundRecord:
    """The wzyg quotient divided once more by n, floored as one exact fraction.

    Bound for (n-1, 2t+1).  Applying ``shrink`` to the integer record instead
    gives the ceiling of the floored quotient, which can be one larger.
    """
    m = _formula_m(n, t)
    value = math.factorial(n) // ((2 * t + 1) * m * n)
    return BoundRecord(f"{label(n - 1, 2 * t + 1)}@wzyg/shrink", n - 1, 2 * t + 1, value,
                       rule="wzyg_shrink", provenance=DERIVED, note=f"t={t}, from n={n}")


# rule arithmetic ----------------------------------------------------------


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _expect(cond: bool, rec: BoundRecord, why: str) -> None:
    if not cond:
        raise DomainError(f"{rec.id}: {why}")


def evaluate(rec: BoundRecord, ante: list[BoundRecord]) -> int:
    """Re-run the arithmetic of ``rec.rule`` on the antecedent records."""
    r, n, d, m = rec.rule, rec.n, rec.d, rec.m
    vals = [a.value for a in ante]
    if r == "input":
        return rec.value
    if r == "sum":
        _expect(all(a.d == d for a in ante), rec, "sum terms must share d")
        return sum(vals)
    if r == "gen":
        outer, inner = ante
        _expect(outer.m is not None and outer.n == n and outer.d == d, rec, "gen needs a restricted (n,m,d) bound")
        _expect(inner.m is None and inner.n == n - outer.m and inner.d == d, rec, "gen needs a full (n-m,d) bound")
        return outer.value * inner.value
    (a,) = ante
    if r == "halve":
        _expect(a.n == n and a.m == m and a.d % 2 == 1 and d == a.d + 1, rec, "halve maps odd d to d+1")
        return _ceil_div(a.value, 2)
    if r == "insert":
        _expect(a.n + 1 == n and a.d == d, rec, "insert maps n to n+1")
        _expect(m == (None if a.m is None else a.m + 1), rec, "insert adds one restricted symbol")
        return _ceil_div(n, d) * a.value
    if r == "shrink":
        _expect(a.n == n + 1 and a.d == d and a.m is None and m is None, rec, "shrink maps n+1 to n")
        return _ceil_div(a.value, a.n)
    if r == "pin":
        k = len(rec.positions) if rec.positions else rec.m
        _expect(a.m is None and a.n == n - k and a.d == d, rec, "pin needs a full (n-m,d) bound")
        return a.value
    if r == "pad":
        _expect(a.n + 1 == n and a.m == m and a.d == d, rec, "pad maps (n,m,d) to (n+1,m,d)")
        return a.value
    if r == "widen":
        _expect(a.n == n and a.m is not None and a.m + 1 == m and a.d == d, rec, "widen maps m to m+1")
        return a.value
    raise DomainError(f"{rec.id}: unknown rule {r!r}")


def base_value(rule: str, n: int, m: int | None, d: int) -> int | None:
    """Value of an antecedent-free rule at a cell, or None if it does not apply."""
    if rule == "reversal":
        return 2 if m is None and 1 <= d <= n * (n - 1) // 2 else None
    if m is None:
        if rule in ("wzyg", "bm") and d % 2 == 1 and d >= 3 and n >= 4 and prime_power(n - 2):
            v = _formula_value(rule, n, (d - 1) // 2)
            return v or None
        return None
    if rule == "prop8":
        return 2 if 1 <= m < n and d <= m * n - m * (m + 1) // 2 else None
    if rule == "thm9a":
        return 3 if m == 2 and n >= 5 and d <= n + n // 3 - 2 else None
    if rule == "thm9b":
        return 5 if m == 2 and n >= 6 and d <= n - 2 else None
    if rule == "pattern3":
        return pattern_d3_size(n) if m == 2 and d == 3 and n >= 4 else None
    if rule == "pattern4":
        return pattern_d4_size(n) if m == 2 and d == 4 and n >= 5 and n % 2 else None
    return None


BASE_RULES = ("reversal", "wzyg", "bm", "prop8", "thm9a", "thm9b", "pattern3", "pattern4")


# database -------------------------------------------------------------------


class BoundsDB:
    """Records by id plus the best record id per grid cell."""

    def __init__(self, records=()):
        self.records: dict[str, BoundRecord] = {}
        self.best: dict[Cell, str] = {}
        for rec in records:
            self.add(rec)

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, rid: str) -> bool:
        return rid in self.records

    def __getitem__(self, rid: str) -> BoundRecord:
        return self.records[rid]

    def _fresh_id(self, base: str) -> str:
        if base not in self.records:
            return base
        k = 2
        while f"{base}#{k}" in self.records:
            k += 1
        return f"{base}#{k}"

    def add(self, rec: BoundRecord) -> BoundRecord:
        """Insert ``rec`` (renaming on id clash); computes a missing value from antecedents."""
        rec.id = self._fresh_id(rec.id)
        if rec.value is None:
            rec.value = evaluate(rec, [self.resolve(a) for a in rec.antecedents])
        if rec.value < 1:
            raise DomainError(f"{rec.id}: bound values are at least 1")
        self.records[rec.id] = rec
        cell = rec.cell
        if cell is not None and (cell not in self.best or rec.value > self.records[self.best[cell]].value):
            self.best[cell] = rec.id
        return rec

    def resolve(self, name: str) -> BoundRecord:
        """Record by id, or the best record of the cell a bare label names."""
        if name in self.records:
            return self.records[name]
        for cell, rid in self.best.items():
            if label(cell[0], cell[2], cell[1]) == name:
                return self.records[rid]
        raise DomainError(f"unknown record {name!r}")

    def best_record(self, n: int, d: int, m: int | None = None) -> BoundRecord | None:
        rid = self.best.get((n, m, d))
        return self.records[rid] if rid else None

    def best_value(self, n: int, d: int, m: int | None = None) -> int | None:
        rec = self.best_record(n, d, m)
        return rec.value if rec else None

    def copy(self) -> "BoundsDB":
        out = BoundsDB()
        out.records = {k: BoundRecord.from_dict(json.loads(v.to_json())) for k, v in self.records.items()}
        out.best = dict(self.best)
        return out

    def dumps(self) -> str:
        return "".join(rec.to_json() + "\n" for rec in self.records.values())

    @classmethod
    def loads(cls, text: str) -> "BoundsDB":
        db = cls()
        for line in text.splitlines():
            if line.strip():
                db.add(BoundRecord.from_dict(json.loads(line)))
        return db

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> "BoundsDB":
        try:
            return cls.loads(Path(path).read_text())
        except OSError as exc:
            raise DomainError(f"cannot read {path}: {exc}") from exc


def replay(rec: BoundRecord, db: BoundsDB) -> int:
    """Recompute ``rec.value`` from its trace; raises on an inconsistent trace."""
    if rec.rule in ("wzyg", "bm"):
        return _formula_value(rec.rule, rec.n, (rec.d - 1) // 2)
    if rec.rule == "wzyg_shrink":
        return shrunk_formula_bound(rec.n + 1, (rec.d - 1) // 2).value
    if rec.rule in BASE_RULES:
        v = base_value(rec.rule, rec.n, rec.m, rec.d)
        if v is None:
            raise DomainError(f"{rec.id}: rule {rec.rule} does not apply")
        return v
    return evaluate(rec, [db.resolve(a) for a in rec.antecedents])


def trace(rec: BoundRecord, db: BoundsDB, indent: str = "") -> list[str]:
    """Human-readable derivation tree."""
    head = f"{indent}{rec.label} >= {rec.value:,}  [{rec.rule}; {rec.provenance}]"
    if rec.flags:
        head += "  FLAG: " + "; ".join(rec.flags)
    lines = [head]
    seen = set()
    for a in rec.antecedents:
        sub = db.resolve(a)
        if sub.id in seen:
            continue
        seen.add(sub.id)
        times = rec.antecedents.count(a)
        prefix = f"{indent}  {times}x " if times > 1 else indent + "  "
        lines += trace(sub, db, prefix)
    return lines


# seed data ------------------------------------------------------------------


def _read_jsonl(path) -> list[dict]:
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]


def certified_records() -> list[BoundRecord]:
    """Bounds backed by shipped arrays that certify when loaded."""
    from .resources import array_names, expand_shipped, load_array, rep_names
    from .verify import certify

    out = []
    for name in rep_names():
        a = expand_shipped(name)
        if certify(a, a.claimed_d).passed:
            out.append(BoundRecord(label(a.n, a.claimed_d) + "@orbit", a.n, a.claimed_d, len(a),
                                   rule="input", provenance=CERTIFIED, note=f"orbit expansion of {name}"))
    for name in array_names():
        a = load_array(name)
        if a.claimed_d and len(a) > 1 and certify(a, a.claimed_d).passed:
            out.append(BoundRecord(label(a.n, a.claimed_d, a.restriction_m) + "@array", a.n, a.claimed_d, len(a),
                                   m=a.restriction_m, rule="input", provenance=CERTIFIED, note=f"shipped array {name}"))
    return out


def seed_db(with_certified: bool = True) -> BoundsDB:
    """Published table values, sum terms and (optionally) locally certified records."""
    from .resources import data_path

    db = BoundsDB()
    for name in ("tables.jsonl", "terms.jsonl"):
        for row in _read_jsonl(data_path("bounds", name)):
            db.add(BoundRecord.from_dict(row))
    if with_certified:
        for rec in certified_records():
            db.add(rec)
    return db


@dataclass
class LedgerEntry:
    record: BoundRecord
    stated: int | None

    @property
    def matches(self) -> bool:
        return self.stated is None or self.stated == self.record.value


def reproduce_ledger(db: BoundsDB, path=None) -> list[LedgerEntry]:
    """Evaluate the stated derivations in order, adding each result to ``db``.

    A computed value that differs from the stated one keeps the computed value
    and carries a flag naming both.
    """
    from .resources import data_path

    rows = _read_jsonl(path or data_path("bounds", "derivations.jsonl"))
    out = []
    for row in rows:
        n, m, d, rule = row["n"], row.get("m"), row["d"], row["rule"]
        base = label(n, d, m)
        rid = base if rule == "input" else f"{base}@{rule}"
        ante = [db.resolve(a).id for a in row["antecedents"]]
        rec = BoundRecord(rid, n, d, row["stated"] if rule == "input" else None, m=m, rule=rule,
                          antecedents=ante, note=row.get("note", ""),
                          provenance=PAPER_CLAIMED if rule == "input" else DERIVED, flags=list(row.get("flags", [])))
        db.add(rec)
        stated = row.get("stated")
        if stated is not None and stated != rec.value:
            rec.flags.append(f"stated {stated:,}, computed {rec.value:,}")
        out.append(LedgerEntry(rec, stated))
    return out


# composer -------------------------------------------------------------------


@dataclass(frozen=True)
class Window:
    n_min: int = 4
    n_max: int = 20
    d_min: int = 1
    d_max: int | None = None
    m_max: int = M_MAX

    def contains(self, n: int, m: int | None, d: int) -> bool:
        if not self.n_min <= n <= self.n_max or d < self.d_min or d > n * (n - 1) // 2:
            return False
        if self.d_max is not None and d > self.d_max:
            return False
        return m is None or 1 <= m <= min(self.m_max, n - 1)

    def cells(self):
        for n in range(self.n_min, self.n_max + 1):
            top = n * (n - 1) // 2 if self.d_max is None else min(self.d_max, n * (n - 1) // 2)
            for d in range(self.d_min, top + 1):
                yield n, None, d
                for m in range(1, min(self.m_max, n - 1) + 1):
                    yield n, m, d

    @classmethod
    def parse(cls, text: str) -> "Window":
        """``n=4:20,d=1:15,m=6``; missing parts keep their defaults."""
        kw = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            key, _, val = part.partition("=")
            lo, _, hi = val.partition(":")
            if key == "n":
                kw["n_min"], kw["n_max"] = int(lo), int(hi or lo)
            elif key == "d":
                kw["d_min"], kw["d_max"] = int(lo), int(hi or lo)
            elif key == "m":
                kw["m_max"] = int(lo)
            else:
                raise DomainError(f"unknown window key {key!r}")
        return cls(**kw)


def _consumers(db: BoundsDB, cell: Cell, win: Window):
    """Candidate records derivable from the best record at ``cell``."""
    n, m, d = cell
    src = db.records[db.best[cell]]
    if m is None:
        if d % 2 == 1:
            yield BoundRecord(f"{label(n, d + 1)}@halve", n, d + 1, None, rule="halve", antecedents=(src.id,))
        yield BoundRecord(f"{label(n + 1, d)}@insert", n + 1, d, None, rule="insert", antecedents=(src.id,))
        if n - 1 >= 1:
            yield BoundRecord(f"{label(n - 1, d)}@shrink", n - 1, d, None, rule="shrink", antecedents=(src.id,))
        for k in range(1, win.m_max + 1):
            outer = db.best_record(n + k, d, k)
            if outer is not None:
                yield BoundRecord(f"{label(n + k, d)}@gen", n + k, d, None, rule="gen", antecedents=(outer.id, src.id))
    else:
        inner = db.best_record(n - m, d)
        if inner is not None:
            yield BoundRecord(f"{label(n, d)}@gen", n, d, None, rule="gen", antecedents=(src.id, inner.id))
        yield BoundRecord(f"{label(n + 1, d, m)}@pad", n + 1, d, None, m=m, rule="pad", antecedents=(src.id,))
        yield BoundRecord(f"{label(n, d, m + 1)}@widen", n, d, None, m=m + 1, rule="widen", antecedents=(src.id,))
        yield BoundRecord(f"{label(n + 1, d, m + 1)}@insert", n + 1, d, None, m=m + 1, rule="insert",
                          antecedents=(src.id,))


def compose_bounds(db: BoundsDB, window: Window | None = None) -> BoundsDB:
    """Close ``db`` under the derivation rules inside ``window``; returns a new database.

    Only strict improvements of a cell's best value are recorded, so the loop
    terminates and the final best values do not depend on processing order.
    """
    win = window or Window()
    out = db.copy()
    for cell in win.cells():
        n, m, d = cell
        for rule in BASE_RULES:
            v = base_value(rule, n, m, d)
            if v is not None and (out.best_value(n, d, m) or 0) < v:
                out.add(BoundRecord(f"{label(n, d, m)}@{rule}", n, d, v, m=m, rule=rule, provenance=DERIVED))
    queue = deque(sorted((c for c in out.best if win.contains(*c)), key=lambda c: (c[0], c[2], c[1] or 0)))
    queued = set(queue)
    while queue:
        cell = queue.popleft()
        queued.discard(cell)
        for cand in _consumers(out, cell, win):
            target = (cand.n, cand.m, cand.d)
            if not win.contains(*target):
                continue
            cand.value = evaluate(cand, [out.records[a] for a in cand.antecedents])
            current = out.best_value(cand.n, cand.d, cand.m)
            if current is not None and cand.value <= current:
                continue
            cand.provenance = DERIVED
            out.add(cand)
            if target not in queued:
                queue.append(target)
                queued.add(target)
    _flag_superseded(out)
    return out


def _flag_superseded(db: BoundsDB) -> None:
    for rec in db.records.values():
        if rec.cell is None or rec.rule != "input" or rec.provenance != PAPER_CLAIMED:
            continue
        best = db.records[db.best[rec.cell]]
        if rec.value < best.value:
            note = f"superseded: {best.rule} gives {best.value:,} > {rec.value:,}"
            if note not in rec.flags:
                rec.flags.append(note)


# claims ------------------------------------------------------------------------


@dataclass
class ClaimCheck:
    n: int
    m: int | None
    d: int
    claimed: int
    source: str
    reproduced: str | None  # id of a record with exactly the claimed value
    best: int | None

    @property
    def status(self) -> str:
        if self.reproduced:
            return "reproduced" if self.best == self.claimed else "reproduced; closure exceeds claim"
        if self.best is None:
            return "no derivation"
        return "not reproduced; closure exceeds claim" if self.best > self.claimed else "not reproduced"


def check_claims(db: BoundsDB, path=None) -> list[ClaimCheck]:
    from .resources import data_path

    out = []
    for row in _read_jsonl(path or data_path("bounds", "claims.jsonl")):
        n, m, d, v = row["n"], row.get("m"), row["d"], row["value"]
        hits = [r.id for r in db.records.values() if r.cell == (n, m, d) and r.value == v]
        out.append(ClaimCheck(n, m, d, v, row.get("source", ""), hits[0] if hits else None, db.best_value(n, d, m)))
    return out


def build(window: Window | None = None, with_certified: bool = True) -> tuple[BoundsDB, list[LedgerEntry]]:
    """Seed, reproduce the stated derivations, then close under the rules."""
    db = seed_db(with_certified)
    ledger = reproduce_ledger(db)
    return compose_bounds(db, window), ledger


# export ------------------------------------------------------------------------


def grid(db: BoundsDB, rows, cols, m: int | None = None, d: int | None = None):
    """Best values on a grid: rows are n; columns are d (``m`` fixed) or m (``d`` fixed)."""
    table = []
    for n in rows:
        line = []
        for c in cols:
            v = db.best_value(n, c, m) if d is None else db.best_value(n, d, c)
            line.append(v)
        table.append(line)
    return table


def export_tables(db: BoundsDB, rows, cols, m: int | None = None, d: int | None = None) -> tuple[str, str]:
    """CSV and aligned-text renderings of :func:`grid`; blank for unknown cells."""
    rows, cols = list(rows), list(cols)
    values = grid(db, rows, cols, m=m, d=d)
    corner = "n:d" if d is None else "n:m"
    header = [corner] + [str(c) for c in cols]
    body = [[str(n)] + ["" if v is None else str(v) for v in line] for n, line in zip(rows, values)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(body)
    pretty = [header] + [[r[0]] + [f"{int(x):,}" if x else "" for x in r[1:]] for r in body]
    widths = [max(len(r[i]) for r in pretty) for i in range(len(header))]
    text = "\n".join("  ".join(x.rjust(w) for x, w in zip(r, widths)) for r in pretty) + "\n"
    return buf.getvalue(), text
