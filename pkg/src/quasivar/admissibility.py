"""Admissibility bases and the decision procedures built on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra import (
    FiniteAlgebra,
    check_signatures,
    closure,
    generator_count,
    minimal_generating_set,
    minimal_subalgebra,
    product,
    restrict,
)
from .free import DEFAULT_MAX_ENTRIES, FreeAlgebra, RowClosure, free_algebra
from .homomorphism import find_homomorphism
from .mingen import EmbeddingCache, min_gen_set
from .terms import DEFAULT_ASSIGNMENT_BUDGET, Clause, Equation, check_satisfiable, check_valid

_BLOCK = 1 << 22
GENERIC_MAX_ENTRIES = 50_000_000


def generators_needed(K: Iterable[FiniteAlgebra]) -> int:
    """Largest minimum generator count over K (constants are free)."""
    return max((generator_count(A) for A in K), default=0)


def _default_n(K: Sequence[FiniteAlgebra], generators: int | None) -> int:
    if generators is not None:
        return generators
    n = generators_needed(K)
    if n == 0 and not K[0].signature.has_constants():
        n = 1
    return n


def free_with_hom_onto(A: FiniteAlgebra, D: Iterable[FiniteAlgebra],
                       max_entries: int = DEFAULT_MAX_ENTRIES) -> tuple[FreeAlgebra, object]:
    """Smallest F_D(m) with A as a homomorphic image, and a surjection onto A.

    The image of F_D(m) is generated by m elements, so sizes of m below the
    generator count of A are skipped without building the free algebra.
    """
    D = list(D)
    check_signatures(A, *D)
    m = 0 if A.signature.has_constants() else 1
    need = generator_count(A)
    while m <= max(A.size, need):
        if m >= need:
            F = free_algebra(D, m, max_entries)
            h = find_homomorphism(F.base, A, "surjective")
            if h is not None:
                return F, h
        m += 1
    raise ValueError(f"{A.name} is not a homomorphic image of a free algebra over the given class")


def _generating_tuple(A: FiniteAlgebra, n: int) -> tuple[int, ...]:
    a = list(minimal_generating_set(A))
    if len(a) > n:
        raise ValueError(f"{A.name} needs {len(a)} generators, only {n} available")
    while len(a) < n:
        a.append(a[-1] if a else 0)
    return tuple(a)


def _best_tuple(values: Callable[[np.ndarray], np.ndarray], total: int, rows: int, ta: np.ndarray,
                a_size: int, limit: int, designated=None, target_designated=None):
    """Scan candidate tuples 0..total-1 for the smallest consistent closure.

    ``values(idx)`` returns the (rows, len(idx)) matrix of term values at the
    candidates.  A candidate is consistent when equal values always carry
    equal A-values ``ta`` (and designated values land on designated ones).
    Returns (size, index) of the first smallest candidate with size <= limit.
    """
    best = None
    chunk = max(1, _BLOCK // max(1, rows))
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        vals = values(idx)
        srt = np.sort(vals, axis=0)
        sizes = 1 + (srt[1:] != srt[:-1]).sum(axis=0)
        bound = limit if best is None else best[0] - 1
        pick = np.flatnonzero(sizes <= bound)
        if not len(pick):
            continue
        sub = vals[:, pick]
        codes = np.sort(sub * a_size + ta[:, None], axis=0)
        csizes = 1 + (codes[1:] != codes[:-1]).sum(axis=0)
        ok = csizes == sizes[pick]
        if designated is not None:
            ok &= ~(designated[sub] & ~target_designated[ta][:, None]).any(axis=0)
        pick = pick[ok]
        if len(pick):
            j = pick[np.argmin(sizes[pick])]
            best = (int(sizes[j]), int(idx[j]))
    return best


def _tuple_at(universe: np.ndarray, n: int, index: int) -> tuple[int, ...]:
    if n == 0:
        return ()
    pos = np.unravel_index(index, (len(universe),) * n)
    return tuple(int(universe[p]) for p in pos)


def smallest_preimage_in_free(F: FreeAlgebra, universe: Sequence[int], A: FiniteAlgebra,
                              designated=None, target_designated=None) -> list[int] | None:
    """Smallest subuniverse of F inside ``universe`` mapping onto A.

    Any such subalgebra contains one generated by preimages of a fixed
    generating tuple of A, so it suffices to scan tuples b over the
    universe, evaluate every element of F (as a term) at b and at the
    generating tuple of A, and keep the b whose value pattern is consistent.
    Returns the elements of Sg(b) in discovery order, or None if no tuple
    works.  With ``designated`` masks the map must also send designated
    elements of F to designated elements of A.
    """
    U = np.asarray(sorted(universe), dtype=np.int64)
    n = F.n
    a = _generating_tuple(A, n)
    ta = F.term_values(A, np.asarray(a, dtype=np.int64).reshape(n, 1))[:, 0]

    def values(idx):
        if n == 0:
            return F.term_values(F.base, np.zeros((0, len(idx)), dtype=np.int64))
        b = U[np.stack(np.unravel_index(idx, (len(U),) * n))]
        return F.term_values(F.base, b)

    best = _best_tuple(values, len(U) ** n, F.size, ta, A.size, len(U), designated, target_designated)
    if best is None:
        return None
    b = _tuple_at(U, n, best[1])
    return closure(F.base, sorted(set(b)))


def _sub_pre_hom_generic(A: FiniteAlgebra, B: FiniteAlgebra, designated=None, target_designated=None,
                         max_entries: int = GENERIC_MAX_ENTRIES) -> list[int] | None:
    a = minimal_generating_set(A)
    n = len(a)
    total = B.size**n
    cols = np.stack(np.unravel_index(np.arange(total), (B.size,) * n)) if n else np.zeros((0, 1), dtype=np.int64)
    rc = RowClosure(B.signature, [B, A], [cols.shape[1], 1], max_entries)
    seeds = [np.concatenate([cols[i], [a[i]]]) for i in range(n)]
    rc.close(seeds)
    rows = rc.rows().astype(np.int64)
    vals, ta = rows[:, :-1], rows[:, -1]
    best = _best_tuple(lambda idx: vals[:, idx], vals.shape[1], rc.N, ta, A.size, B.size,
                       designated, target_designated)
    if best is None:
        return None
    b = _tuple_at(np.arange(B.size), n, best[1])
    return closure(B, sorted(set(b)))


def sub_pre_hom(A: FiniteAlgebra, B: FiniteAlgebra | FreeAlgebra) -> FiniteAlgebra:
    """A smallest proper subalgebra of B with a surjection onto A, else B itself."""
    if isinstance(B, FreeAlgebra):
        check_signatures(A, B.base)
        elems = smallest_preimage_in_free(B, range(B.size), A)
        base = B.base
    else:
        check_signatures(A, B)
        elems = _sub_pre_hom_generic(A, B)
        base = B
    if elems is None:
        raise ValueError(f"{base.name} has no homomorphism onto {A.name}")
    if len(elems) == base.size:
        return base
    return restrict(base, elems, name=f"S({base.name})", generators=None)[0]


@dataclass
class AdmissibilityBasis:
    source: list[FiniteAlgebra]
    basis: list[FiniteAlgebra]
    # per collected algebra: source member name, generators m, chain of sizes
    provenance: list[dict] = field(default_factory=list)
    collected: list[FiniteAlgebra] = field(default_factory=list)


_adm_cache: dict = {}


def adm_algs(K: Iterable[FiniteAlgebra], max_entries: int = DEFAULT_MAX_ENTRIES,
             cache: EmbeddingCache | None = None) -> AdmissibilityBasis:
    """Minimal generating set of Q(F_K(omega)), via smallest preimages in free algebras."""
    K = list(K)
    check_signatures(*K)
    key = (tuple(A.key for A in K), max_entries)
    if key in _adm_cache:
        return _adm_cache[key]
    D = min_gen_set(K, cache)
    collected, prov = [], []
    for A in D:
        F, _ = free_with_hom_onto(A, D, max_entries)
        elems = list(range(F.size))
        chain = [F.size]
        while True:
            smaller = smallest_preimage_in_free(F, elems, A)
            if smaller is None:
                raise AssertionError("lost the surjection onto a generating algebra")
            if len(smaller) >= len(elems):
                break
            elems = smaller
            chain.append(len(elems))
        B = restrict(F.base, elems, name=f"Adm({A.name})")[0] if len(elems) < F.size else F.base
        collected.append(B)
        prov.append({"source": A.name, "generators": F.n, "chain": chain})
    basis = min_gen_set(collected, cache)
    for i, B in enumerate(basis):
        if not B.name or B.name.startswith("F("):
            basis[i] = B.renamed(f"Adm{i + 1}")
    result = AdmissibilityBasis(K, basis, prov, collected)
    if len(_adm_cache) > 64:
        _adm_cache.clear()
    _adm_cache[key] = result
    return result


def smallest_free_subalgebra(K: Sequence[FiniteAlgebra], max_entries: int = DEFAULT_MAX_ENTRIES) -> FiniteAlgebra:
    """Smallest subalgebra of F_K(omega): F_K(0) with constants, else inside F_K(1)."""
    n = 0 if K[0].signature.has_constants() else 1
    return minimal_subalgebra(free_algebra(K, n, max_entries).base)


def check_unifiable(K: Iterable[FiniteAlgebra], sigma: Sequence[Equation],
                    max_entries: int = DEFAULT_MAX_ENTRIES,
                    budget: int | None = DEFAULT_ASSIGNMENT_BUDGET) -> bool:
    K = list(K)
    check_signatures(*K)
    return check_satisfiable(smallest_free_subalgebra(K, max_entries), sigma, budget)


def _trivial(sig) -> FiniteAlgebra:
    return FiniteAlgebra(sig, 1, [np.zeros((1,) * a, dtype=np.int64) for a in sig.arities], "T")


def check_admissible(K: Iterable[FiniteAlgebra], c: Clause, direct: bool = False,
                     generators: int | None = None, max_entries: int = DEFAULT_MAX_ENTRIES,
                     budget: int | None = DEFAULT_ASSIGNMENT_BUDGET) -> bool:
    """K-admissibility of a quasiequation or negative clause.

    The default evaluates the clause in the admissibility basis; ``direct``
    evaluates it in F_K(n) instead, n being the generator bound (or
    ``generators`` when given).
    """
    K = list(K)
    sig = check_signatures(*K)
    if len(c.conclusions) > 1:
        raise ValueError("admissibility is decided only for clauses with at most one conclusion")
    if direct:
        F = free_algebra(K, _default_n(K, generators), max_entries)
        return check_valid([F.base], c, budget)
    basis = adm_algs(K, max_entries).basis
    return check_valid(basis or [_trivial(sig)], c, budget)


def is_structurally_complete(K: Iterable[FiniteAlgebra], generators: int | None = None,
                             max_entries: int = DEFAULT_MAX_ENTRIES,
                             cache: EmbeddingCache | None = None) -> bool:
    """Every member of the minimal generating set embeds into F_K(n)."""
    K = list(K)
    check_signatures(*K)
    cache = cache or EmbeddingCache()
    D = min_gen_set(K, cache)
    if not D:
        return True
    F = free_algebra(K, _default_n(K, generators), max_entries)
    return all(cache.embeds(A, F.base) for A in D)


def is_almost_structurally_complete(K: Iterable[FiniteAlgebra], generators: int | None = None,
                                    max_entries: int = DEFAULT_MAX_ENTRIES,
                                    cache: EmbeddingCache | None = None) -> bool:
    """Minimal generating set of {A x B} embeds into F_K(n), B smallest in F_K(omega)."""
    K = list(K)
    check_signatures(*K)
    cache = cache or EmbeddingCache()
    B = smallest_free_subalgebra(K, max_entries)
    D = min_gen_set([product([A, B]) for A in K], cache)
    if not D:
        return True
    F = free_algebra(K, _default_n(K, generators), max_entries)
    return all(cache.embeds(A, F.base) for A in D)
