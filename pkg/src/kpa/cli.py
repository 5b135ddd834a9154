"""Command-line entry point: ``kpa <subcommand> ...``.

Exit codes: 0 success, 2 certification failure, 1 usage or domain error.
"""

from __future__ import annotations

import argparse
import os
import shlex
import sys
from pathlib import Path

from . import __version__
from .arrayfile import dumps, read_array
from .perm import DomainError, Permutation, kendall_distance
from .verify import PermArray, certify

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _range(text: str) -> range:
    lo, _, hi = text.partition(":")
    return range(int(lo), int(hi or lo) + 1)


def _command_line(argv) -> str:
    return "kpa " + shlex.join(argv)


def _emit_array(a: PermArray, args, extra: dict) -> None:
    extra = {"command": _command_line(args.argv), **extra}
    text = dumps(a, extra=extra, keep_order=args.keep_order)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {len(a)} permutations to {args.out}")
    else:
        sys.stdout.write(text)


def _report(a: PermArray, d: int, threads) -> int:
    report = certify(a, d, threads=threads, allow_large=True)
    print(report, file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


# subcommands -------------------------------------------------------------------


def cmd_dist(args) -> int:
    a = Permutation.parse(args.sigma, one_based=args.one_based)
    b = Permutation.parse(args.pi, one_based=args.one_based)
    print(kendall_distance(a, b))
    return EXIT_OK


def cmd_verify(args) -> int:
    a = read_array(args.file)
    d = args.d if args.d is not None else a.claimed_d
    if d is None:
        raise DomainError("no --d given and the file header has no d")
    report = certify(a, d, threads=args.threads, allow_large=args.allow_large)
    print(report)
    if report.witness_pair is not None:
        for i in report.witness_pair:
            print(f"witness[{i}]: {' '.join(map(str, a.table[i].tolist()))}")
    if report.duplicates:
        print(f"duplicates removed: {report.duplicates}")
    return EXIT_OK if report.passed else EXIT_FAIL


def _domain(n: int, kind: str, poly: str | None):
    from .algebra import SymbolDomain, parse_poly, prime_power

    if kind == "auto":
        kind = "field" if prime_power(n) else "ring"
    if kind == "field":
        return SymbolDomain.field(n, parse_poly(poly) if poly else None)
    if poly:
        raise DomainError("--poly only applies to fields")
    return SymbolDomain.ring(n)


def cmd_expand(args) -> int:
    from .algebra import expand_orbits, parse_ops
    from .resources import data_path, rep_header

    if args.shipped:
        path = data_path("reps", f"{args.shipped}.txt")
        ops = args.ops or rep_header(args.shipped)["ops"]
    elif args.reps:
        path, ops = args.reps, args.ops
    else:
        raise DomainError("give --reps FILE or --shipped NAME")
    if not ops:
        raise DomainError("--ops is required with --reps")
    reps = read_array(path)
    if args.n is not None and args.n != reps.n:
        raise DomainError(f"--n {args.n} does not match the representatives (n={reps.n})")
    domain = _domain(reps.n, args.domain, args.poly)
    out = expand_orbits(domain, reps, parse_ops(ops))
    d = args.d if args.d is not None else reps.claimed_d
    out = out.with_meta(claimed_d=d)
    _emit_array(out, args, {"ops": ops, "domain": str(domain), "reps": len(reps)})
    return _report(out, d, args.threads) if d else EXIT_OK


def _space(args):
    from .search import SearchSpace

    if args.space == "full":
        return SearchSpace.full(args.n)
    if args.space == "s-nm":
        if args.m is None:
            raise DomainError("--space s-nm needs --m")
        return SearchSpace.restricted_sorted(args.n, args.m)
    if not args.positions:
        raise DomainError("--space fixed needs --positions")
    pos = _ints(args.positions)
    if args.one_based:
        pos = [p - 1 for p in pos]
    return SearchSpace.fixed_positions(args.n, pos)


def cmd_search(args) -> int:
    from .search import RNG_NAME, best_of_restarts

    if args.ops:
        from .algebra import parse_ops, rep_search

        domain = _domain(args.n, args.domain, args.poly)
        reps = rep_search(domain, args.d, parse_ops(args.ops), budget=args.restarts, rng_seed=args.rng)
        _emit_array(reps, args, {"rng": f"{RNG_NAME}({args.rng})", "restarts": args.restarts,
                                 "ops": args.ops, "domain": str(domain), "reps": len(reps)})
        return EXIT_OK
    schedule = _ints(args.seeds) if args.seeds else None
    kw = {"schedule": schedule} if schedule else {}
    best = best_of_restarts(_space(args), args.d, args.restarts, rng_seed=args.rng, threads=args.threads, **kw)
    _emit_array(best, args, {"rng": f"{RNG_NAME}({args.rng})", "restarts": args.restarts})
    return EXIT_OK


def cmd_clique(args) -> int:
    from .search import clique_exact

    best = clique_exact(_space(args), args.d, guard=args.guard)
    _emit_array(best, args, {"optimum": len(best)})
    return EXIT_OK


def cmd_construct(args) -> int:
    from . import constructions as c

    def need(name):
        value = getattr(args, name)
        if value is None:
            raise DomainError(f"--rule {args.rule} needs --{name.replace('_', '-')}")
        return value

    def load(path):
        a = read_array(path)
        return a.with_meta(claimed_d=args.d) if args.d is not None else a

    rule = args.rule
    if rule == "halve":
        out = c.halve_even(load(need("input")))
    elif rule == "insert":
        out = c.insert_symbol(load(need("input")))
    elif rule == "compose":
        inners = need("inner")
        if len(inners) != 1:
            raise DomainError("--rule compose takes exactly one --inner")
        out = c.compose(load(need("input")), load(inners[0]))
    elif rule == "compose-sum":
        outer = load(need("input"))
        m = outer.restriction_m
        if m is None:
            raise DomainError("outer array must declare m in its header")
        by_place = {c.large_symbol_placement(t, m): tuple(t) for t in outer.table.tolist()}
        inners = {}
        for path in need("inner"):
            inner = load(path)
            key = by_place.get(c.large_symbol_placement(inner.table[0].tolist(), m))
            if key is None:
                raise DomainError(f"{path}: placement matches no outer member")
            inners[key] = inner
        out = c.compose_sum(outer, inners)
    elif rule == "prop8":
        out = c.two_point_array(need("n"), need("m"))
    elif rule == "thm9a":
        out = c.three_array(need("n"))
    elif rule == "thm9b":
        out = c.five_array(need("n"))
    elif rule == "pattern-d3":
        out = c.pattern_d3(need("n"))
    else:
        out = c.pattern_d4(need("n"))
    _emit_array(out, args, {"rule": rule})
    return EXIT_OK


def _load_db(args):
    from .bounds import BoundsDB, build, compose_bounds

    if args.input:
        return compose_bounds(BoundsDB.load(args.input), args.window)
    db, _ = build(args.window, with_certified=not args.no_certified)
    return db


def cmd_bounds_derive(args) -> int:
    from .bounds import build, check_claims, compose_bounds, BoundsDB

    if args.input:
        db = compose_bounds(BoundsDB.load(args.input), args.window)
        ledger = []
    else:
        db, ledger = build(args.window, with_certified=not args.no_certified)
    for entry in ledger:
        rec = entry.record
        mark = "ok  " if entry.matches else "FLAG"
        print(f"{mark} {rec.label:>10} >= {rec.value:>12,}  [{rec.rule}]" + (f"  {'; '.join(rec.flags)}" if rec.flags else ""))
    if not args.input:
        for chk in check_claims(db):
            print(f"claim {chk.n},{chk.d} = {chk.claimed:,} ({chk.source}): {chk.status}")
    if args.out:
        db.save(args.out)
        print(f"wrote {len(db)} records to {args.out}")
    return EXIT_OK


def cmd_bounds_show(args) -> int:
    from .bounds import export_tables, trace

    db = _load_db(args)
    if args.trace:
        print("\n".join(trace(db.resolve(args.trace), db)))
        return EXIT_OK
    rows = args.rows
    if args.table == "P-n-d":
        cols = args.cols or range(3, 16)
        csv_text, text = export_tables(db, rows, cols)
    else:
        if args.d is None:
            raise DomainError("--table P-n-m-d needs --d")
        cols = args.cols or range(2, 7)
        csv_text, text = export_tables(db, rows, cols, d=args.d)
    sys.stdout.write(csv_text if args.csv else text)
    return EXIT_OK


# parser ---------------------------------------------------------------------------


def _window(text: str):
    from .bounds import Window

    return Window.parse(text)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kpa", description="Permutation arrays under the Kendall-tau metric.")
    p.add_argument("--version", action="version", version=f"kpa {__version__}")
    p.add_argument("--threads", type=int, default=None,
                   help="worker cap for verification and search (default: $KPA_THREADS or all cores)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def out_opts(sp):
        sp.add_argument("--out", help="output array file (default: stdout)")
        sp.add_argument("--keep-order", action="store_true", help="do not sort rows before writing")

    def space_opts(sp):
        sp.add_argument("--space", choices=("full", "s-nm", "fixed"), default="full")
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--m", type=int)
        sp.add_argument("--positions", help="positions of the m largest symbols, smallest symbol first (0-based)")
        sp.add_argument("--one-based", action="store_true", help="read --positions as 1-based")
        sp.add_argument("--d", type=int, required=True)

    sp = sub.add_parser("dist", help="Kendall-tau distance of two permutations")
    sp.add_argument("sigma")
    sp.add_argument("pi")
    sp.add_argument("--one-based", action="store_true")
    sp.set_defaults(func=cmd_dist)

    sp = sub.add_parser("verify", help="certify the minimum pairwise distance of an array file")
    sp.add_argument("file")
    sp.add_argument("--d", type=int)
    sp.add_argument("--allow-large", action="store_true")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("expand", help="expand orbit representatives")
    sp.add_argument("--reps", help="representative array file")
    sp.add_argument("--shipped", help="name of a bundled representative list, e.g. p8d4")
    sp.add_argument("--ops", help="operation letters: a=scale value, b=shift argument, c=shift value")
    sp.add_argument("--n", type=int)
    sp.add_argument("--d", type=int, help="certify the expansion at this distance")
    sp.add_argument("--domain", choices=("auto", "ring", "field"), default="auto")
    sp.add_argument("--poly", help="field polynomial, high-to-low coefficients, e.g. 1,1,0,1")
    out_opts(sp)
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("search", help="random-greedy search with restarts, or orbit representative search")
    space_opts(sp)
    sp.add_argument("--seeds", help="seed-count schedule, e.g. 1 or 1,2,4")
    sp.add_argument("--restarts", type=int, default=100)
    sp.add_argument("--rng", type=int, default=0, help="rng seed")
    sp.add_argument("--ops", help="search orbit representatives under these operations instead")
    sp.add_argument("--domain", choices=("auto", "ring", "field"), default="auto")
    sp.add_argument("--poly")
    out_opts(sp)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("clique", help="exact maximum array by clique search (small spaces)")
    space_opts(sp)
    sp.add_argument("--guard", type=int, default=5040, help="largest space size allowed")
    out_opts(sp)
    sp.set_defaults(func=cmd_clique)

    sp = sub.add_parser("construct", help="apply a deterministic construction")
    sp.add_argument("--rule", required=True, choices=("halve", "insert", "compose", "compose-sum", "prop8",
                                                      "thm9a", "thm9b", "pattern-d3", "pattern-d4"))
    sp.add_argument("--in", dest="input", help="input (outer) array file")
    sp.add_argument("--inner", action="append", help="inner array file (repeat for compose-sum)")
    sp.add_argument("--n", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--d", type=int, help="certified distance of the inputs (default: from headers)")
    out_opts(sp)
    sp.set_defaults(func=cmd_construct)

    bp = sub.add_parser("bounds", help="lower-bound database")
    bsub = bp.add_subparsers(dest="bounds_command", required=True, parser_class=_Parser)

    def db_opts(sp):
        sp.add_argument("--in", dest="input", help="bounds JSONL to close (default: bundled seed data)")
        sp.add_argument("--window", type=_window, default=None, help="e.g. n=4:20,d=1:40,m=6")
        sp.add_argument("--no-certified", action="store_true", help="skip records certified from bundled arrays")

    sp = bsub.add_parser("derive", help="reproduce stated derivations and close under the rules")
    db_opts(sp)
    sp.add_argument("--out", help="write the closed database as JSONL")
    sp.set_defaults(func=cmd_bounds_derive)

    sp = bsub.add_parser("show", help="render best bounds as a table")
    db_opts(sp)
    sp.add_argument("--table", choices=("P-n-d", "P-n-m-d"), default="P-n-d")
    sp.add_argument("--d", type=int, help="distance for P-n-m-d tables")
    sp.add_argument("--rows", type=_range, default=range(12, 18), help="n range, e.g. 12:17")
    sp.add_argument("--cols", type=_range, help="d range (P-n-d) or m range (P-n-m-d)")
    sp.add_argument("--csv", action="store_true")
    sp.add_argument("--trace", help="print the derivation of one record, e.g. 'P(16,13)'")
    sp.set_defaults(func=cmd_bounds_show)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    if args.threads is not None:
        if args.threads < 1:
            parser.error("--threads must be >= 1")
        os.environ["KPA_THREADS"] = str(args.threads)
    try:
        return args.func(args)
    except (DomainError, OSError) as exc:
        print(f"kpa: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
