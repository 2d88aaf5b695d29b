"""Random algebras, terms and clauses for property tests."""

from __future__ import annotations

import itertools
import random

import numpy as np
from hypothesis import strategies as st

from quasivar.algebra import FiniteAlgebra, Signature
from quasivar.terms import App, Clause, Equation, Rule, Var

UNARY_BINARY = Signature.of(("u", 1), ("b", 2))
BINARY = Signature.of(("b", 2))


@st.composite
def small_algebras(draw, max_size=4, signature=UNARY_BINARY, min_size=1):
    k = draw(st.integers(min_size, max_size))
    tables = []
    for ar in signature.arities:
        vals = draw(st.lists(st.integers(0, k - 1), min_size=k**ar, max_size=k**ar))
        tables.append(np.array(vals).reshape((k,) * ar) if ar else vals[0])
    return FiniteAlgebra(signature, k, tables, f"R{k}")


def random_term(rng: random.Random, sig: Signature, names, depth: int):
    ops = [(n, a) for n, a in sig if a > 0]
    consts = [n for n, a in sig if a == 0]
    if depth == 0 or rng.random() < 0.3:
        if consts and rng.random() < 0.15:
            return App(rng.choice(consts), ())
        return Var(rng.choice(names))
    name, ar = rng.choice(ops)
    return App(name, tuple(random_term(rng, sig, names, depth - 1) for _ in range(ar)))


def random_equation(rng, sig, names, depth=2):
    return Equation(random_term(rng, sig, names, depth), random_term(rng, sig, names, depth))


def random_clause(rng, sig, names=("x", "y"), depth=2, negative=False):
    prem = tuple(random_equation(rng, sig, names, depth) for _ in range(rng.randint(0, 2)))
    concl = () if negative else (random_equation(rng, sig, names, depth),)
    return Clause(prem, concl)


def random_rule(rng, sig, names=("x", "y"), depth=2):
    prem = tuple(random_term(rng, sig, names, depth) for _ in range(rng.randint(0, 2)))
    return Rule(prem, random_term(rng, sig, names, depth))


def all_maps(A, B):
    for img in itertools.product(range(B.size), repeat=A.size):
        yield img


def equivalence_relations(k: int):
    """All partitions of 0..k-1 as block-id lists (restricted growth strings)."""
    def grow(prefix, m):
        if len(prefix) == k:
            yield list(prefix)
            return
        for b in range(m + 1):
            yield from grow(prefix + [b], max(m, b + 1))
    if k == 0:
        yield []
        return
    yield from grow([0], 1)
