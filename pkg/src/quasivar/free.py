"""Finite free algebras F_K(n) built inside products of members of K."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .algebra import ElementMap, FiniteAlgebra, check_signatures, iter_new_tuples
from .errors import ResourceError
from .terms import App, Term, Var

DEFAULT_MAX_ENTRIES = 2_000_000
MAX_TABLE_ENTRIES = 60_000_000
_BLOCK = 1 << 22


class FreeAlgebra:
    """F_K(n) with Birkhoff coordinates and witness terms.

    Column ``c`` of ``coordinates`` belongs to member ``K[j]`` and to the
    ``i``-th (lexicographic) assignment of the generators into it, where
    ``offsets[j] <= c < offsets[j+1]`` and ``i = c - offsets[j]``.
    """

    def __init__(self, K, n, base, generators, coordinates, recipes, offsets):
        self.K = tuple(K)
        self.n = n
        self.base: FiniteAlgebra = base
        self.generators: tuple[int, ...] = tuple(generators)
        self.coordinates: np.ndarray = coordinates
        self._recipes = recipes
        self.offsets = tuple(offsets)
        self._witness: dict[int, Term] = {}

    @property
    def size(self) -> int:
        return self.base.size

    def variables(self) -> list[Var]:
        return [Var(f"x{i + 1}") for i in range(self.n)]

    def witness(self, e: int) -> Term:
        """First term discovered for element ``e``."""
        e = int(e)
        stack = [e]
        while stack:
            x = stack[-1]
            if x in self._witness:
                stack.pop()
                continue
            rec = self._recipes[x]
            if rec[0] == "var":
                self._witness[x] = Var(f"x{rec[1] + 1}")
                stack.pop()
                continue
            op, args = rec
            todo = [a for a in args if a not in self._witness]
            if todo:
                stack.extend(todo)
                continue
            name = self.base.signature.names[op]
            self._witness[x] = App(name, tuple(self._witness[a] for a in args))
            stack.pop()
        return self._witness[e]

    def witnesses(self) -> list[Term]:
        return [self.witness(e) for e in range(self.size)]

    def assignment(self, column: int) -> tuple[int, tuple[int, ...]]:
        """(member index, generator values) for a coordinate column."""
        for j, A in enumerate(self.K):
            if column < self.offsets[j + 1]:
                i = column - self.offsets[j]
                vals = np.unravel_index(i, (A.size,) * self.n) if self.n else ()
                return j, tuple(int(v) for v in vals)
        raise IndexError(column)

    def column(self, j: int, values: Sequence[int]) -> int:
        A = self.K[j]
        i = int(np.ravel_multi_index(tuple(values), (A.size,) * self.n)) if self.n else 0
        return self.offsets[j] + i

    def evaluation(self, j: int, values: Sequence[int]) -> ElementMap:
        """The homomorphism F -> K[j] extending x_i -> values[i]."""
        col = self.coordinates[:, self.column(j, values)]
        return ElementMap(self.base, self.K[j], tuple(int(v) for v in col))

    def term_values(self, alg: FiniteAlgebra, gen_values) -> np.ndarray:
        """Values of every element's witness term in ``alg``.

        ``gen_values`` has shape (n, C): column c assigns x_i -> gen_values[i, c].
        The result has shape (size, C).
        """
        gv = np.asarray(gen_values, dtype=np.int64)
        C = gv.shape[1] if gv.ndim == 2 else 1
        gv = gv.reshape(self.n, C)
        out = np.empty((self.size, C), dtype=np.int64)
        for x, rec in enumerate(self._recipes):
            if rec[0] == "var":
                out[x] = gv[rec[1]]
            else:
                op, args = rec
                t = alg.tables[op]
                out[x] = t[tuple(out[a] for a in args)] if args else int(t)
        return out

    def __repr__(self):
        return f"FreeAlgebra(n={self.n}, size={self.size}, K=[{', '.join(a.name for a in self.K)}])"


def _dedupe(K: Sequence[FiniteAlgebra]) -> list[FiniteAlgebra]:
    out, seen = [], set()
    for A in K:
        if A.key not in seen:
            seen.add(A.key)
            out.append(A)
    return out


class RowClosure:
    """Subalgebra of a product generated by explicit rows.

    Columns are grouped into segments, one per factor algebra.  Rows are
    deduplicated by content and numbered in discovery order: seeds, then
    constants, then closure rounds (symbols in signature order, argument
    tuples lexicographic).  ``recipes[e]`` is ``("var", i)`` for the i-th
    seed or ``(op, argument ids)``.
    """

    def __init__(self, signature, factors, seg_sizes, max_entries=DEFAULT_MAX_ENTRIES):
        self.sig = signature
        self.factors = list(factors)
        offs = [0]
        for s in seg_sizes:
            offs.append(offs[-1] + int(s))
        self.offsets = offs
        self.L = L = offs[-1]
        self.segs = [slice(offs[j], offs[j + 1]) for j in range(len(self.factors))]
        self.max_entries = max_entries
        if L > max_entries:
            raise ResourceError("free algebra size cap", max_entries, L, "one element's coordinates")
        self.dtype = np.uint8 if max(A.size for A in self.factors) <= 256 else np.uint16
        self.cap = 64
        self.coords = np.empty((self.cap, L), dtype=self.dtype)
        self.index: dict[bytes, int] = {}
        self.recipes: list = []
        self.N = 0
        self.results: dict[int, list] = {i: [] for i, ar in enumerate(signature.arities) if ar > 0}
        self.const_ids: dict[int, int] = {}
        self.max_arity = max(signature.arities, default=0)

    def _grow(self, need):
        if need * self.L > self.max_entries:
            raise ResourceError("free algebra size cap", self.max_entries, need * self.L, "coordinate entries")
        if need**self.max_arity > MAX_TABLE_ENTRIES:
            # the operation tables of the result would not fit
            raise ResourceError("free algebra table cap", MAX_TABLE_ENTRIES, need**self.max_arity, "table entries")
        if need > self.cap:
            while self.cap < need:
                self.cap *= 2
            bigger = np.empty((self.cap, self.L), dtype=self.dtype)
            bigger[:self.N] = self.coords[:self.N]
            self.coords = bigger

    def intern(self, rows: np.ndarray, recipe_of) -> np.ndarray:
        rows = np.ascontiguousarray(rows, dtype=self.dtype)
        view = rows.view(np.dtype((np.void, rows.dtype.itemsize * self.L))).ravel()
        _, first, inverse = np.unique(view, return_index=True, return_inverse=True)
        ids = np.empty(len(first), dtype=np.int64)
        for u in np.argsort(first, kind="stable"):
            f = first[u]
            key = view[f].tobytes()
            got = self.index.get(key)
            if got is None:
                self._grow(self.N + 1)
                self.coords[self.N] = rows[f]
                self.index[key] = got = self.N
                self.recipes.append(recipe_of(f))
                self.N += 1
            ids[u] = got
        return ids[inverse.ravel()]

    def close(self, seed_rows) -> list[int]:
        """Add seed rows and constants, close, and return the seed ids."""
        seeds = [int(self.intern(np.asarray(r)[None, :], lambda f, i=i: ("var", i))[0])
                 for i, r in enumerate(seed_rows)]
        for c in self.sig.constants:
            row = np.empty((1, self.L), dtype=self.dtype)
            for j, A in enumerate(self.factors):
                row[0, self.segs[j]] = int(A.tables[c])
            self.const_ids[c] = int(self.intern(row, lambda f, c=c: (c, ()))[0])
        ops = [(i, ar) for i, ar in enumerate(self.sig.arities) if ar > 0]
        s, e = 0, self.N
        while s < e:
            for i, ar in ops:
                chunk = max(1, _BLOCK // (self.L * ar))
                for tup in iter_new_tuples(s, e, ar, chunk):
                    args = self.coords[tup]  # (T, ar, L)
                    res = np.empty((len(tup), self.L), dtype=self.dtype)
                    for j, A in enumerate(self.factors):
                        sg = self.segs[j]
                        res[:, sg] = A.tables[i][tuple(args[:, q, sg].astype(np.int64) for q in range(ar))]
                    ids = self.intern(res, lambda f, i=i, tup=tup: (i, tuple(int(a) for a in tup[f])))
                    self.results[i].append((tup, ids))
            s, e = e, self.N
        return seeds

    def rows(self) -> np.ndarray:
        return self.coords[:self.N]

    def tables(self) -> list:
        N = self.N
        out = []
        for i, ar in enumerate(self.sig.arities):
            if ar == 0:
                out.append(self.const_ids[i])
                continue
            if N**ar > MAX_TABLE_ENTRIES:
                raise ResourceError("free algebra table cap", MAX_TABLE_ENTRIES, N**ar, self.sig.names[i])
            t = np.empty((N,) * ar, dtype=np.int64)
            for tup, ids in self.results[i]:
                t[tuple(tup.T)] = ids
            out.append(t)
        return out


def free_algebra(K: Iterable[FiniteAlgebra], n: int, max_entries: int = DEFAULT_MAX_ENTRIES,
                 name: str | None = None) -> FreeAlgebra:
    """F_K(n) as the subalgebra of a power product generated by the projections."""
    K = _dedupe(list(K))
    if not K:
        raise ValueError("free algebra of an empty class")
    sig = check_signatures(*K)
    n = int(n)
    if n < 0:
        raise ValueError("number of generators must be non-negative")
    if n == 0 and not sig.has_constants():
        raise ValueError("F(0) needs a constant in the signature")
    rc = RowClosure(sig, K, [A.size**n for A in K], max_entries)
    seed_rows = []
    for i in range(n):
        row = np.empty(rc.L, dtype=np.int64)
        for j, A in enumerate(K):
            row[rc.segs[j]] = np.indices((A.size,) * n).reshape(n, -1)[i]
        seed_rows.append(row)
    gens = rc.close(seed_rows)
    label = name or f"F({','.join(A.name for A in K)};{n})"
    base = FiniteAlgebra(sig, rc.N, rc.tables(), label, generators=gens)
    return FreeAlgebra(K, n, base, gens, rc.rows().copy(), rc.recipes, rc.offsets)


def free_size(K: Iterable[FiniteAlgebra], n: int, max_entries: int = DEFAULT_MAX_ENTRIES) -> int:
    return free_algebra(K, n, max_entries).size
