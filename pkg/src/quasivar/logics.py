"""Finite-valued logics given by a matrix (algebra, designated values)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .admissibility import smallest_preimage_in_free
from .algebra import FiniteAlgebra, generator_count, restrict
from .free import DEFAULT_MAX_ENTRIES, FreeAlgebra, free_algebra
from .terms import DEFAULT_ASSIGNMENT_BUDGET, Rule, Term, check_term, eval_vector, iter_assignments, variables


@dataclass(frozen=True)
class Logic:
    algebra: FiniteAlgebra
    designated: frozenset

    def __init__(self, algebra: FiniteAlgebra, designated: Iterable[int]):
        d = frozenset(int(x) for x in designated)
        if any(x < 0 or x >= algebra.size for x in d):
            raise ValueError("designated value outside the universe")
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "designated", d)

    @property
    def size(self) -> int:
        return self.algebra.size

    def mask(self) -> np.ndarray:
        m = np.zeros(self.algebra.size, dtype=bool)
        m[list(self.designated)] = True
        return m

    def __repr__(self):
        return f"Logic({self.algebra.name}, size={self.size}, designated={sorted(self.designated)})"


def find_counterexample(L: Logic, gamma: Sequence[Term], phi: Term,
                        budget: int | None = DEFAULT_ASSIGNMENT_BUDGET) -> dict[str, int] | None:
    """First assignment designating all of gamma but not phi."""
    A = L.algebra
    gamma = tuple(gamma)
    for t in gamma + (phi,):
        check_term(t, A.signature)
    names = variables(list(gamma) + [phi])
    mask = L.mask()
    for chunk in iter_assignments(A.size, len(names), budget, f"consequence over {A.name}"):
        m = len(chunk)
        env = {v: chunk[:, i] for i, v in enumerate(names)}
        bad = np.ones(m, dtype=bool)
        for g in gamma:
            bad &= mask[eval_vector(A, g, env, m)]
        bad &= ~mask[eval_vector(A, phi, env, m)]
        hits = np.flatnonzero(bad)
        if len(hits):
            return {v: int(chunk[hits[0], i]) for i, v in enumerate(names)}
    return None


def consequence(L: Logic, gamma: Sequence[Term], phi: Term,
                budget: int | None = DEFAULT_ASSIGNMENT_BUDGET) -> bool:
    return find_counterexample(L, gamma, phi, budget) is None


def _star_parts(L: Logic, generators: int | None, max_entries: int) -> tuple[FreeAlgebra, np.ndarray]:
    A = L.algebra
    n = generator_count(A) if generators is None else generators
    F = free_algebra([A], n, max_entries)
    star = L.mask()[F.coordinates.astype(np.int64)].all(axis=1)
    return F, star


def logic_star(L: Logic, generators: int | None = None, max_entries: int = DEFAULT_MAX_ENTRIES) -> Logic:
    """The free-algebra logic: an element is designated iff its witness is a theorem of L.

    By default the free algebra has as many generators as A needs rather
    than |A|; ``generators`` overrides this.
    """
    F, star = _star_parts(L, generators, max_entries)
    return Logic(F.base, np.flatnonzero(star).tolist())


def reduced_logic(L: Logic, generators: int | None = None, max_entries: int = DEFAULT_MAX_ENTRIES) -> Logic:
    """Smallest sublogic of the free-algebra logic mapping onto L while preserving designation."""
    F, star = _star_parts(L, generators, max_entries)
    elems = smallest_preimage_in_free(F, range(F.size), L.algebra, designated=star,
                                      target_designated=L.mask())
    if elems is None or len(elems) == F.size:
        return Logic(F.base, np.flatnonzero(star).tolist())
    B = restrict(F.base, elems, name=f"R({L.algebra.name})")[0]
    return Logic(B, [i for i, e in enumerate(elems) if star[e]])


def rule_admissible(L: Logic, r: Rule, via: str = "reduced", generators: int | None = None,
                    budget: int | None = DEFAULT_ASSIGNMENT_BUDGET) -> bool:
    if via == "reduced":
        M = reduced_logic(L, generators)
    elif via == "star":
        M = logic_star(L, generators)
    else:
        raise ValueError("via must be 'reduced' or 'star'")
    return consequence(M, r.premises, r.conclusion, budget)
