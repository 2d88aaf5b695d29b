"""Command-line interface.

Exit status: 0 for "yes" (or success), 1 for "no", 10 for usage and parse
errors, 11 when a resource cap is exceeded.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import admissibility, census, logics
from .errors import ParseError, QuasivarError, ResourceError, SignatureError
from .fileformat import format_algebras, read_algebras
from .free import DEFAULT_MAX_ENTRIES, free_algebra
from .mingen import min_gen_set
from .terms import DEFAULT_ASSIGNMENT_BUDGET, parse_clause, parse_equations, parse_rule

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 10, 11
EMPTY = "empty generating set (trivial quasivariety)"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p):
    p.add_argument("--max-free-size", type=int, default=DEFAULT_MAX_ENTRIES, metavar="N",
                   help="cap on free-algebra coordinate entries (default %(default)s)")
    p.add_argument("--assignment-budget", type=int, default=DEFAULT_ASSIGNMENT_BUDGET, metavar="N",
                   help="cap on assignments enumerated per validity check")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quasivar", description="Quasivarieties, free algebras and admissible rules of finite algebras.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("free", help="build a free algebra F_K(n)")
    p.add_argument("files", nargs="+")
    p.add_argument("-n", type=int, required=True, help="number of generators")
    p.add_argument("--witnesses", action="store_true", help="print a term for every element")
    p.add_argument("--tables", action="store_true", help="print the free algebra in the algebra format")
    _common(p)

    p = sub.add_parser("mingen", help="minimal generating set of Q(K)")
    p.add_argument("files", nargs="+")
    _common(p)

    p = sub.add_parser("admalgs", help="minimal generating set of Q(F_K(omega))")
    p.add_argument("files", nargs="+")
    _common(p)

    p = sub.add_parser("check", help="decide a property of K")
    p.add_argument("what", choices=["sc", "asc", "adm", "unif"])
    p.add_argument("files", nargs="+")
    p.add_argument("--clause", help="clause for 'adm', e.g. 'x ~ neg(x) =>'")
    p.add_argument("--equations", help="equation list for 'unif', e.g. 'x ~ neg(x)'")
    p.add_argument("--direct", action="store_true", help="evaluate in F_K(n) instead of the basis")
    p.add_argument("--generators", type=int, metavar="N", help="free algebra rank for sc/asc/--direct")
    _common(p)

    p = sub.add_parser("logic", help="finite-valued logic (first algebra, designated values)")
    p.add_argument("what", choices=["star", "reduce", "adm"])
    p.add_argument("files", nargs="+")
    p.add_argument("--designated", required=True, help="comma-separated designated elements")
    p.add_argument("--algebra", help="name of the algebra to use (default: first)")
    p.add_argument("--rule", help="rule for 'adm', e.g. 'x, imp(x,y) / y'")
    p.add_argument("--via", choices=["reduced", "star"], default="reduced")
    p.add_argument("--generators", type=int, metavar="N", help="free algebra rank (default: generators of A)")
    _common(p)

    p = sub.add_parser("census", help="SC/ASC census of all algebras with one operation")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--arity", type=int, required=True)
    p.add_argument("--full-admalgs", action="store_true", help="run AdmAlgs on every class")
    p.add_argument("--out", help="stream per-class records to this file")
    p.add_argument("--resume", help="reuse records from this file")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timeout", type=float, help="per-class time limit in seconds")
    p.add_argument("--limit", type=int, help="only the first N classes")
    _common(p)
    return parser


def _yes_no(label: str, value: bool, out) -> int:
    print(f"{label}: {'yes' if value else 'no'}", file=out)
    return EXIT_YES if value else EXIT_NO


def _load(files):
    sig, algs = read_algebras(files)
    if not algs:
        raise ParseError("no algebra blocks found", files[0])
    return sig, algs


def _cmd_free(a, out):
    _, K = _load(a.files)
    F = free_algebra(K, a.n, a.max_free_size)
    print(f"size {F.size}", file=out)
    if a.witnesses:
        for e in range(F.size):
            print(f"{e} {F.witness(e)}", file=out)
    if a.tables:
        print(format_algebras([F.base.renamed(f"F{a.n}")]), end="", file=out)
    return EXIT_YES


def _print_set(algs, sig, out):
    if not algs:
        print(EMPTY, file=out)
    else:
        print(format_algebras(algs, sig), end="", file=out)
    return EXIT_YES


def _cmd_mingen(a, out):
    sig, K = _load(a.files)
    return _print_set(min_gen_set(K), sig, out)


def _cmd_admalgs(a, out):
    sig, K = _load(a.files)
    return _print_set(admissibility.adm_algs(K, a.max_free_size).basis, sig, out)


def _cmd_check(a, out):
    sig, K = _load(a.files)
    if a.what == "sc":
        return _yes_no("structurally complete",
                       admissibility.is_structurally_complete(K, a.generators, a.max_free_size), out)
    if a.what == "asc":
        return _yes_no("almost structurally complete",
                       admissibility.is_almost_structurally_complete(K, a.generators, a.max_free_size), out)
    if a.what == "adm":
        if not a.clause:
            raise UsageError("check adm needs --clause")
        c = parse_clause(a.clause, sig)
        ok = admissibility.check_admissible(K, c, a.direct, a.generators, a.max_free_size, a.assignment_budget)
        return _yes_no("admissible", ok, out)
    if a.equations is None:
        raise UsageError("check unif needs --equations")
    sigma = parse_equations(a.equations, sig)
    return _yes_no("unifiable", admissibility.check_unifiable(K, sigma, a.max_free_size, a.assignment_budget), out)


def _parse_designated(text: str, size: int) -> list[int]:
    try:
        vals = [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"--designated expects integers, got {text!r}") from None
    if any(v < 0 or v >= size for v in vals):
        raise UsageError(f"designated values must lie in 0..{size - 1}")
    return vals


def _print_logic(L, out):
    print(format_algebras([L.algebra]), end="", file=out)
    # a comment line keeps the output parseable as an algebra file
    print("# designated " + " ".join(map(str, sorted(L.designated))), file=out)


def _cmd_logic(a, out):
    sig, algs = _load(a.files)
    A = algs[0]
    if a.algebra:
        named = [B for B in algs if B.name == a.algebra]
        if not named:
            raise UsageError(f"no algebra named {a.algebra!r}")
        A = named[0]
    L = logics.Logic(A, _parse_designated(a.designated, A.size))
    if a.what == "star":
        _print_logic(logics.logic_star(L, a.generators, a.max_free_size), out)
        return EXIT_YES
    if a.what == "reduce":
        _print_logic(logics.reduced_logic(L, a.generators, a.max_free_size), out)
        return EXIT_YES
    if not a.rule:
        raise UsageError("logic adm needs --rule")
    r = parse_rule(a.rule, sig)
    return _yes_no("admissible", logics.rule_admissible(L, r, a.via, a.generators, a.assignment_budget), out)


def _cmd_census(a, out):
    rep = census.run_census(a.size, a.arity, a.full_admalgs, a.out, a.resume, a.jobs, a.timeout,
                            a.max_free_size, a.limit)
    print(rep.summary(), file=out)
    return EXIT_YES


COMMANDS = {
    "free": _cmd_free,
    "mingen": _cmd_mingen,
    "admalgs": _cmd_admalgs,
    "check": _cmd_check,
    "logic": _cmd_logic,
    "census": _cmd_census,
}


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except (ParseError, SignatureError) as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except ResourceError as e:
        print(f"resource limit: {e}", file=err)
        return EXIT_RESOURCE
    except (QuasivarError, ValueError, KeyError) as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
