"""Terms, equations, clauses and rules: syntax, parsing and evaluation."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .algebra import FiniteAlgebra, Signature, check_signatures
from .errors import ParseError, ResourceError, SignatureError

DEFAULT_ASSIGNMENT_BUDGET = 50_000_000
_CHUNK = 1 << 16


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    op: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.op
        return f"{self.op}({', '.join(map(str, self.args))})"


Term = Union[Var, App]


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{self.lhs} ~ {self.rhs}"


@dataclass(frozen=True)
class Clause:
    """Premises => conclusions; one conclusion is a quasiequation, none a negative clause."""

    premises: tuple[Equation, ...] = ()
    conclusions: tuple[Equation, ...] = ()

    def is_quasiequation(self) -> bool:
        return len(self.conclusions) == 1

    def is_negative(self) -> bool:
        return not self.conclusions

    def __str__(self):
        return f"{', '.join(map(str, self.premises))} => {', '.join(map(str, self.conclusions))}".strip()


@dataclass(frozen=True)
class Rule:
    premises: tuple[Term, ...]
    conclusion: Term

    def __str__(self):
        return f"{', '.join(map(str, self.premises))} / {self.conclusion}"


def variables(*items) -> list[str]:
    """Sorted variable names occurring in terms, equations, clauses or rules."""
    out: set[str] = set()

    def walk(x):
        if isinstance(x, Var):
            out.add(x.name)
        elif isinstance(x, App):
            for a in x.args:
                walk(a)
        elif isinstance(x, Equation):
            walk(x.lhs)
            walk(x.rhs)
        elif isinstance(x, Clause):
            for e in x.premises + x.conclusions:
                walk(e)
        elif isinstance(x, Rule):
            for t in x.premises:
                walk(t)
            walk(x.conclusion)
        elif isinstance(x, (list, tuple, set, frozenset)):
            for y in x:
                walk(y)
        else:
            raise TypeError(f"cannot collect variables of {type(x).__name__}")

    for it in items:
        walk(it)
    return sorted(out)


def check_term(t: Term, signature: Signature) -> None:
    if isinstance(t, Var):
        return
    if t.op not in signature:
        raise SignatureError(f"unknown symbol {t.op!r}")
    ar = signature.arity(t.op)
    if ar != len(t.args):
        raise SignatureError(f"{t.op} takes {ar} arguments, got {len(t.args)}")
    for a in t.args:
        check_term(a, signature)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_+.']*)|(?P<arrow>=>)|(?P<p>[(),~/]))")


def _tokenize(text: str) -> list[str]:
    toks = []
    i = 0
    text = text.rstrip()
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {text[i:].strip()[:1]!r} in {text!r}")
        toks.append(m.group("id") or m.group("arrow") or m.group("p"))
        i = m.end()
    return toks


class _Parser:
    def __init__(self, text: str, signature: Signature | None):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = signature

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            want = expected or "a token"
            raise ParseError(f"expected {want} but found {tok or 'end of input'} in {self.text!r}")
        self.i += 1
        return tok

    def done(self):
        if self.peek() is not None:
            raise ParseError(f"unexpected {self.peek()!r} in {self.text!r}")

    def term(self) -> Term:
        name = self.take()
        if not re.match(r"[A-Za-z_]", name):
            raise ParseError(f"expected a term but found {name!r} in {self.text!r}")
        if self.peek() == "(":
            self.take("(")
            args = []
            if self.peek() != ")":
                args.append(self.term())
                while self.peek() == ",":
                    self.take(",")
                    args.append(self.term())
            self.take(")")
            t = App(name, tuple(args))
            if self.sig is not None:
                if name not in self.sig:
                    raise ParseError(f"unknown symbol {name!r} in {self.text!r}")
                if self.sig.arity(name) != len(args):
                    raise ParseError(f"{name} takes {self.sig.arity(name)} arguments, got {len(args)}")
            return t
        if self.sig is not None and name in self.sig:
            if self.sig.arity(name) != 0:
                raise ParseError(f"{name} takes {self.sig.arity(name)} arguments, got 0")
            return App(name, ())
        return Var(name)

    def equation(self) -> Equation:
        lhs = self.term()
        self.take("~")
        return Equation(lhs, self.term())

    def equations(self, stop) -> list[Equation]:
        out = []
        if self.peek() in stop:
            return out
        out.append(self.equation())
        while self.peek() == ",":
            self.take(",")
            out.append(self.equation())
        return out

    def terms(self, stop) -> list[Term]:
        out = []
        if self.peek() in stop:
            return out
        out.append(self.term())
        while self.peek() == ",":
            self.take(",")
            out.append(self.term())
        return out


def parse_term(text: str, signature: Signature | None = None) -> Term:
    """Parse ``name(t1, ...)``; a bare identifier is a variable unless it is a constant."""
    p = _Parser(text, signature)
    t = p.term()
    p.done()
    return t


def parse_equation(text: str, signature: Signature | None = None) -> Equation:
    p = _Parser(text, signature)
    e = p.equation()
    p.done()
    return e


def parse_equations(text: str, signature: Signature | None = None) -> tuple[Equation, ...]:
    p = _Parser(text, signature)
    es = p.equations({None})
    p.done()
    return tuple(es)


def parse_clause(text: str, signature: Signature | None = None) -> Clause:
    """``e1, e2 => f1, f2``; an empty right side gives a negative clause.

    Without ``=>`` the text is read as a single equation with no premises.
    """
    p = _Parser(text, signature)
    if "=>" not in p.toks:
        e = p.equation()
        p.done()
        return Clause((), (e,))
    prem = p.equations({"=>"})
    p.take("=>")
    concl = p.equations({None})
    p.done()
    return Clause(tuple(prem), tuple(concl))


def parse_rule(text: str, signature: Signature | None = None) -> Rule:
    p = _Parser(text, signature)
    prem = p.terms({"/"})
    p.take("/")
    concl = p.term()
    p.done()
    return Rule(tuple(prem), concl)


# ---------------------------------------------------------------------------
# evaluation

def eval_term(alg: FiniteAlgebra, t: Term, assignment: Mapping[str, int]) -> int:
    """Value of ``t`` under a variable assignment."""
    if isinstance(t, Var):
        if t.name not in assignment:
            raise KeyError(f"unbound variable {t.name}")
        v = int(assignment[t.name])
        if not 0 <= v < alg.size:
            raise ValueError(f"value {v} outside universe of {alg.name}")
        return v
    i = alg.signature.index(t.op)
    ar = alg.signature.arities[i]
    if ar != len(t.args):
        raise SignatureError(f"{t.op} takes {ar} arguments, got {len(t.args)}")
    return int(alg.tables[i][tuple(eval_term(alg, a, assignment) for a in t.args)])


def eval_vector(alg: FiniteAlgebra, t: Term, env: Mapping[str, np.ndarray], n: int | None = None) -> np.ndarray:
    """Evaluate ``t`` elementwise over arrays of variable values."""
    cache: dict = {}

    def ev(u):
        if u in cache:
            return cache[u]
        if isinstance(u, Var):
            if u.name not in env:
                raise KeyError(f"unbound variable {u.name}")
            r = np.asarray(env[u.name])
        else:
            i = alg.signature.index(u.op)
            ar = alg.signature.arities[i]
            if ar != len(u.args):
                raise SignatureError(f"{u.op} takes {ar} arguments, got {len(u.args)}")
            if ar == 0:
                size = n if n is not None else (len(next(iter(env.values()))) if env else 1)
                r = np.full(size, int(alg.tables[i]), dtype=np.int64)
            else:
                r = alg.tables[i][tuple(ev(a) for a in u.args)]
        cache[u] = r
        return r

    return ev(t)


def iter_assignments(size: int, nvars: int, budget: int | None = DEFAULT_ASSIGNMENT_BUDGET, what: str = ""):
    """Chunks of lexicographically ordered assignments as an (m, nvars) array."""
    total = size**nvars
    if budget is not None and total > budget:
        raise ResourceError("assignment budget", budget, total, what)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        if nvars == 0:
            yield np.zeros((len(idx), 0), dtype=np.int64)
        else:
            yield np.stack(np.unravel_index(idx, (size,) * nvars), axis=1)


def _holds(alg, eqs, env, m):
    ok = np.ones(m, dtype=bool)
    for e in eqs:
        ok &= eval_vector(alg, e.lhs, env, m) == eval_vector(alg, e.rhs, env, m)
    return ok


def _clause_signature_check(alg: FiniteAlgebra, c: Clause) -> None:
    for e in c.premises + c.conclusions:
        check_term(e.lhs, alg.signature)
        check_term(e.rhs, alg.signature)


def find_countermodel(K: Iterable[FiniteAlgebra], c: Clause,
                      budget: int | None = DEFAULT_ASSIGNMENT_BUDGET) -> tuple[FiniteAlgebra, dict[str, int]] | None:
    """First (algebra, assignment) violating ``c``, or None if ``c`` is valid in K."""
    K = list(K)
    if K:
        check_signatures(*K)
    names = variables(c)
    for alg in K:
        _clause_signature_check(alg, c)
        for chunk in iter_assignments(alg.size, len(names), budget, f"clause over {alg.name}"):
            m = len(chunk)
            env = {v: chunk[:, i] for i, v in enumerate(names)}
            bad = _holds(alg, c.premises, env, m)
            if c.conclusions:
                some = np.zeros(m, dtype=bool)
                for e in c.conclusions:
                    some |= eval_vector(alg, e.lhs, env, m) == eval_vector(alg, e.rhs, env, m)
                bad &= ~some
            hits = np.flatnonzero(bad)
            if len(hits):
                row = chunk[hits[0]]
                return alg, {v: int(row[i]) for i, v in enumerate(names)}
    return None


def check_valid(K: Iterable[FiniteAlgebra], c: Clause, budget: int | None = DEFAULT_ASSIGNMENT_BUDGET) -> bool:
    return find_countermodel(K, c, budget) is None


def find_solution(alg: FiniteAlgebra, sigma: Sequence[Equation],
                  budget: int | None = DEFAULT_ASSIGNMENT_BUDGET) -> dict[str, int] | None:
    """First assignment satisfying every equation of ``sigma``."""
    sigma = tuple(sigma)
    names = variables(sigma)
    for e in sigma:
        check_term(e.lhs, alg.signature)
        check_term(e.rhs, alg.signature)
    for chunk in iter_assignments(alg.size, len(names), budget, f"satisfiability over {alg.name}"):
        env = {v: chunk[:, i] for i, v in enumerate(names)}
        hits = np.flatnonzero(_holds(alg, sigma, env, len(chunk)))
        if len(hits):
            return {v: int(chunk[hits[0], i]) for i, v in enumerate(names)}
    return None


def check_satisfiable(alg: FiniteAlgebra, sigma: Sequence[Equation],
                      budget: int | None = DEFAULT_ASSIGNMENT_BUDGET) -> bool:
    return find_solution(alg, sigma, budget) is not None
