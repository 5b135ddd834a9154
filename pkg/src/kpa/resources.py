"""Access to the data files shipped inside the package."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path

from .arrayfile import parse_header, read_array
from .verify import PermArray


def data_path(*parts: str) -> Path:
    return Path(str(files("kpa").joinpath("data", *parts)))


def rep_names() -> list[str]:
    return sorted(p.stem for p in data_path("reps").glob("*.txt"))


def rep_header(name: str) -> dict[str, str]:
    """All ``key=value`` pairs from the comment lines of a representative file."""
    meta: dict[str, str] = {}
    for line in data_path("reps", f"{name}.txt").read_text().splitlines():
        if not line.startswith("#"):
            break
        for key, value in parse_header(line).items():
            meta.setdefault(key, value)
    return meta


def load_reps(name: str) -> tuple[PermArray, str]:
    """Representatives and the operation letters used to expand them."""
    return read_array(data_path("reps", f"{name}.txt")), rep_header(name)["ops"]


def array_names() -> list[str]:
    return sorted(p.stem for p in data_path("arrays").glob("*.txt"))


def load_array(name: str) -> PermArray:
    return read_array(data_path("arrays", f"{name}.txt"))


def expand_shipped(name: str) -> PermArray:
    """Expand a shipped representative list over GF(n) when n is a prime power, else Z_n."""
    from .algebra import SymbolDomain, expand_orbits, parse_ops, prime_power

    reps, ops = load_reps(name)
    domain = SymbolDomain.field(reps.n) if prime_power(reps.n) else SymbolDomain.ring(reps.n)
    out = expand_orbits(domain, reps, parse_ops(ops))
    return out.with_meta(claimed_d=reps.claimed_d)
