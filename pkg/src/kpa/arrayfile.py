"""Reading and writing permutation array files.

Format::

    # n=8 d=7 m=2 provenance=expand:ac
    # any other comment line
    0 5 3 1 4 6 2 7
    ...

Symbols are written 0-based.  Files whose rows use ``1..n`` (no zero) are
read as 1-based and shifted down.
"""

from __future__ import annotations

import re
from pathlib import Path

from . import __version__
from .perm import DomainError
from .verify import PermArray

_KEY = re.compile(r"(\w+)=(\S*)")


def parse_header(line: str) -> dict[str, str]:
    body = line.lstrip("#").strip()
    if "provenance=" in body:
        head, _, prov = body.partition("provenance=")
        fields = dict(_KEY.findall(head))
        fields["provenance"] = prov.strip()
    else:
        fields = dict(_KEY.findall(body))
    return fields


def _opt_int(value: str | None) -> int | None:
    if value in (None, "", "-", "None", "none"):
        return None
    return int(value)


def loads(text: str) -> PermArray:
    meta: dict[str, str] = {}
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = parse_header(line)
            for key in ("n", "d", "m", "provenance", "base"):
                if key in fields and key not in meta:
                    meta[key] = fields[key]
            continue
        rows.append([int(tok) for tok in line.replace(",", " ").split()])
    n = _opt_int(meta.get("n"))
    if rows:
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DomainError("rows have differing lengths")
        one_based = meta.get("base") == "1" or (
            meta.get("base") is None and all(0 not in r for r in rows) and any(width in r for r in rows)
        )
        if one_based:
            rows = [[v - 1 for v in r] for r in rows]
    return PermArray(
        rows,
        n=n,
        claimed_d=_opt_int(meta.get("d")),
        restriction_m=_opt_int(meta.get("m")),
        provenance=meta.get("provenance", ""),
    )


def read_array(path) -> PermArray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def dumps(a: PermArray, extra: dict[str, object] | None = None, keep_order: bool = False) -> str:
    arr = a if keep_order else a.sorted()
    m = "-" if a.restriction_m is None else a.restriction_m
    d = "-" if a.claimed_d is None else a.claimed_d
    lines = [f"# n={a.n} d={d} m={m} provenance={a.provenance}"]
    lines.append(f"# tool=kpa {__version__}")
    for key, value in (extra or {}).items():
        lines.append(f"# {key}={value}")
    lines.append(f"# size={len(arr)}")
    lines.extend(" ".join(map(str, row)) for row in arr.table.tolist())
    return "\n".join(lines) + "\n"


def write_array(path, a: PermArray, extra=None, keep_order: bool = False) -> None:
    Path(path).write_text(dumps(a, extra=extra, keep_order=keep_order))
