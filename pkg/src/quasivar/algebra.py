"""Signatures, finite algebras and the basic constructions on them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import ResourceError, SignatureError
from .partition import Partition

DEFAULT_PRODUCT_CAP = 1_000_000


@dataclass(frozen=True)
class Signature:
    """Ordered list of ``(name, arity)`` pairs."""

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        syms = tuple((str(n), int(a)) for n, a in self.symbols)
        object.__setattr__(self, "symbols", syms)
        names = [n for n, _ in syms]
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate symbol in signature {names}")
        for n, a in syms:
            if a < 0:
                raise SignatureError(f"negative arity for {n}")

    @classmethod
    def of(cls, *pairs) -> Signature:
        return cls(tuple(pairs))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.symbols)

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(a for _, a in self.symbols)

    @property
    def constants(self) -> tuple[int, ...]:
        """Indices of the 0-ary symbols."""
        return tuple(i for i, (_, a) in enumerate(self.symbols) if a == 0)

    def has_constants(self) -> bool:
        return bool(self.constants)

    def index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.symbols):
            if n == name:
                return i
        raise SignatureError(f"unknown symbol {name!r}")

    def arity(self, name: str) -> int:
        return self.symbols[self.index(name)][1]

    def __contains__(self, name) -> bool:
        return name in self.names

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __str__(self):
        return ", ".join(f"{n}/{a}" for n, a in self.symbols)


class FiniteAlgebra:
    """Universe ``0..size-1`` with one total numpy table per symbol.

    The table for an ``r``-ary symbol has shape ``(size,) * r``.  Tables are
    read-only; algebras compare equal when their signatures and tables agree
    (the name is ignored).  ``generators`` optionally records a generating
    tuple, which speeds up homomorphism search out of this algebra.
    """

    def __init__(
        self,
        signature: Signature | Iterable[tuple[str, int]],
        size: int,
        tables: Sequence | Mapping[str, object],
        name: str = "A",
        generators: Sequence[int] | None = None,
    ):
        if not isinstance(signature, Signature):
            signature = Signature(tuple(signature))
        size = int(size)
        if size < 1:
            raise ValueError("algebra size must be positive")
        if isinstance(tables, Mapping):
            missing = [n for n in signature.names if n not in tables]
            extra = [n for n in tables if n not in signature]
            if missing or extra:
                raise SignatureError(f"tables do not match signature (missing {missing}, extra {extra})")
            tables = [tables[n] for n in signature.names]
        if len(tables) != len(signature):
            raise SignatureError(f"expected {len(signature)} tables, got {len(tables)}")
        arrs = []
        for (sym, ar), t in zip(signature, tables):
            a = np.array(t, dtype=np.int64)
            shape = (size,) * ar
            if a.shape != shape:
                if a.size != size**ar:
                    raise ValueError(f"table {sym} has {a.size} entries, expected {size ** ar}")
                a = a.reshape(shape)
            if a.size and (a.min() < 0 or a.max() >= size):
                raise ValueError(f"table {sym} has entries outside 0..{size - 1}")
            a.setflags(write=False)
            arrs.append(a)
        self.signature = signature
        self.size = size
        self.tables: tuple[np.ndarray, ...] = tuple(arrs)
        self.name = name
        self.generators = None if generators is None else tuple(int(g) for g in generators)
        self._key = None

    def table(self, symbol: str | int) -> np.ndarray:
        if isinstance(symbol, str):
            symbol = self.signature.index(symbol)
        return self.tables[symbol]

    def apply(self, symbol: str | int, *args: int) -> int:
        t = self.table(symbol)
        return int(t[tuple(args)]) if args else int(t)

    @property
    def key(self) -> tuple:
        """Hashable structural identity (signature plus table bytes)."""
        if self._key is None:
            self._key = (self.signature, self.size, tuple(t.tobytes() for t in self.tables))
        return self._key

    def __eq__(self, other):
        return isinstance(other, FiniteAlgebra) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"FiniteAlgebra({self.name!r}, size={self.size}, signature=[{self.signature}])"

    def is_trivial(self) -> bool:
        return self.size == 1

    def renamed(self, name: str) -> FiniteAlgebra:
        return FiniteAlgebra(self.signature, self.size, self.tables, name, self.generators)

    def relabel(self, perm: Sequence[int], name: str | None = None) -> FiniteAlgebra:
        """Isomorphic copy where old element ``a`` becomes ``perm[a]``."""
        p = np.asarray(perm, dtype=np.int64)
        if sorted(p.tolist()) != list(range(self.size)):
            raise ValueError("relabel needs a permutation of the universe")
        inv = np.argsort(p)
        tables = []
        for t in self.tables:
            idx = np.ix_(*[inv] * t.ndim) if t.ndim else ()
            tables.append(p[t[idx]])
        gens = None if self.generators is None else [int(p[g]) for g in self.generators]
        return FiniteAlgebra(self.signature, self.size, tables, name or self.name, gens)


@dataclass(frozen=True, eq=False)
class ElementMap:
    """A map between universes, ``image[a]`` being the image of ``a``."""

    source: FiniteAlgebra
    target: FiniteAlgebra
    image: tuple[int, ...]

    def __post_init__(self):
        img = tuple(int(x) for x in self.image)
        object.__setattr__(self, "image", img)
        if len(img) != self.source.size:
            raise ValueError("image length differs from source size")
        if any(x < 0 or x >= self.target.size for x in img):
            raise ValueError("image entry outside target universe")

    def __call__(self, a: int) -> int:
        return self.image[a]

    def is_injective(self) -> bool:
        return len(set(self.image)) == len(self.image)

    def is_surjective(self) -> bool:
        return len(set(self.image)) == self.target.size

    def kernel(self) -> Partition:
        return Partition(self.image)

    def compose(self, after: ElementMap) -> ElementMap:
        """``after`` applied to the result of ``self``."""
        return ElementMap(self.source, after.target, tuple(after.image[x] for x in self.image))


def check_signatures(*algs: FiniteAlgebra) -> Signature:
    if not algs:
        raise ValueError("no algebras given")
    sig = algs[0].signature
    for a in algs[1:]:
        if a.signature != sig:
            raise SignatureError(f"signature mismatch: [{sig}] vs [{a.signature}]")
    return sig


# ---------------------------------------------------------------------------
# argument tuples

def all_tuples(e: int, r: int) -> np.ndarray:
    """All r-tuples over 0..e-1 in lexicographic order, shape (e**r, r)."""
    if r == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((e,) * r, dtype=np.int64).reshape(r, -1).T


def new_tuples(s: int, e: int, r: int) -> np.ndarray:
    """Lexicographic r-tuples over 0..e-1 having some entry >= s."""
    if r == 0 or s >= e:
        return np.zeros((0, r), dtype=np.int64)
    if r == 1:
        return np.arange(s, e, dtype=np.int64)[:, None]
    return np.concatenate(list(iter_new_tuples(s, e, r, chunk=1 << 62)))


def iter_new_tuples(s: int, e: int, r: int, chunk: int = 1 << 16) -> Iterator[np.ndarray]:
    """Chunks of ``new_tuples(s, e, r)``, in order."""
    if r == 0 or s >= e:
        return
    if r == 1:
        yield np.arange(s, e, dtype=np.int64)[:, None]
        return
    rest_new = new_tuples(s, e, r - 1)
    rest_all = all_tuples(e, r - 1)
    buf, n = [], 0
    for i in range(e):
        rest = rest_all if i >= s else rest_new
        if not len(rest):
            continue
        block = np.empty((len(rest), r), dtype=np.int64)
        block[:, 0] = i
        block[:, 1:] = rest
        buf.append(block)
        n += len(block)
        if n >= chunk:
            yield np.concatenate(buf)
            buf, n = [], 0
    if buf:
        yield np.concatenate(buf)


# ---------------------------------------------------------------------------
# closure

class Closure:
    """Incremental closure of a subset of ``alg`` under all operations.

    Elements are kept in discovery order: seeds first, then constants, then
    round after round of new values, each round scanning symbols in signature
    order and argument tuples lexicographically (by discovery position).
    ``recipes[i]`` is ``None`` for a seed or ``(op, argument elements)``.
    """

    def __init__(self, alg: FiniteAlgebra, limit: int | None = None):
        self.alg = alg
        self.limit = limit
        self.order: list[int] = []
        self.pos = np.full(alg.size, -1, dtype=np.int64)
        self.recipes: list[tuple | None] = []
        self.aborted = False

    def __len__(self):
        return len(self.order)

    def _push(self, x: int, recipe) -> bool:
        self.pos[x] = len(self.order)
        self.order.append(x)
        self.recipes.append(recipe)
        if self.limit is not None and len(self.order) > self.limit:
            self.aborted = True
            return False
        return True

    def add(self, seeds: Iterable[int] = ()) -> bool:
        """Add seeds (and constants), then close.  False if the limit tripped."""
        if self.aborted:
            return False
        start = len(self.order)
        for x in seeds:
            x = int(x)
            if self.pos[x] < 0 and not self._push(x, None):
                return False
        for c in self.alg.signature.constants:
            x = int(self.alg.tables[c])
            if self.pos[x] < 0 and not self._push(x, (c, ())):
                return False
        return self._close(start)

    def _close(self, s: int) -> bool:
        ops = [(i, t) for i, t in enumerate(self.alg.tables) if t.ndim > 0]
        e = len(self.order)
        while s < e:
            order = np.asarray(self.order, dtype=np.int64)
            for i, t in ops:
                for tup in iter_new_tuples(s, e, t.ndim):
                    args = order[tup]
                    res = t[tuple(args.T)]
                    fresh = np.flatnonzero(self.pos[res] < 0)
                    if not len(fresh):
                        continue
                    _, first = np.unique(res[fresh], return_index=True)
                    for j in fresh[np.sort(first)]:
                        if not self._push(int(res[j]), (i, tuple(int(a) for a in args[j]))):
                            return False
            s, e = e, len(self.order)
        return True

    def elements(self) -> list[int]:
        return list(self.order)


def closure(alg: FiniteAlgebra, seed: Iterable[int] = (), limit: int | None = None) -> list[int] | None:
    """Subuniverse generated by ``seed`` in discovery order, or None past ``limit``."""
    c = Closure(alg, limit)
    return c.elements() if c.add(seed) else None


def restrict(alg: FiniteAlgebra, elements: Sequence[int], name: str | None = None,
             generators: Sequence[int] | None = None) -> tuple[FiniteAlgebra, ElementMap]:
    """The subalgebra on a closed subset, numbered in the given order."""
    elems = np.asarray(elements, dtype=np.int64)
    pos = np.full(alg.size, -1, dtype=np.int64)
    pos[elems] = np.arange(len(elems))
    tables = []
    for t in alg.tables:
        sub = t[np.ix_(*[elems] * t.ndim)] if t.ndim else t
        mapped = pos[sub]
        if np.any(mapped < 0):
            raise ValueError("subset is not closed under the operations")
        tables.append(mapped)
    gens = None if generators is None else [int(pos[g]) for g in generators]
    sub = FiniteAlgebra(alg.signature, len(elems), tables, name or f"S({alg.name})", gens)
    return sub, ElementMap(sub, alg, tuple(int(x) for x in elems))


def generated_subalgebra(alg: FiniteAlgebra, seed: Iterable[int]) -> tuple[FiniteAlgebra, ElementMap]:
    seed = sorted(set(int(x) for x in seed))
    if any(x < 0 or x >= alg.size for x in seed):
        raise ValueError("seed element outside the universe")
    if not seed and not alg.signature.has_constants():
        raise ValueError("empty seed needs a constant in the signature")
    elems = closure(alg, seed)
    return restrict(alg, elems, generators=seed)


def minimal_subalgebra(alg: FiniteAlgebra) -> FiniteAlgebra:
    """Subalgebra generated by the constants, else a smallest 1-generated one."""
    if alg.signature.has_constants():
        return generated_subalgebra(alg, ())[0]
    best = None
    for a in range(alg.size):
        elems = closure(alg, [a], limit=None if best is None else len(best) - 1)
        if elems is not None and (best is None or len(elems) < len(best)):
            best = elems
            if len(best) == 1:
                break
    return restrict(alg, best, generators=best[:1])[0]


def unary_range(alg: FiniteAlgebra) -> np.ndarray:
    """Boolean mask of elements that are values of some non-constant operation."""
    mask = np.zeros(alg.size, dtype=bool)
    for t in alg.tables:
        if t.ndim > 0:
            mask[np.unique(t)] = True
    return mask


def minimal_generating_set(alg: FiniteAlgebra) -> tuple[int, ...]:
    """A smallest generating tuple (constants come for free), lex-least by size.

    Elements outside the range of every operation are in every generating
    set, so the search only ranges over the rest.
    """
    forced = [a for a in np.flatnonzero(~unary_range(alg)).tolist()]
    base = Closure(alg)
    base.add(forced)
    if len(base) == alg.size:
        return tuple(forced)
    rest = [a for a in range(alg.size) if base.pos[a] < 0]
    for r in range(1, len(rest) + 1):
        for combo in itertools.combinations(rest, r):
            c = Closure(alg)
            c.add(forced + list(combo))
            if len(c) == alg.size:
                return tuple(sorted(forced + list(combo)))
    raise AssertionError("unreachable: the whole universe generates")


def generator_count(alg: FiniteAlgebra) -> int:
    return len(minimal_generating_set(alg))


def greedy_generators(alg: FiniteAlgebra) -> tuple[int, ...]:
    """A (not necessarily minimum) generating tuple, found cheaply.

    Uses the algebra's recorded generators when available.
    """
    if alg.generators is not None:
        return alg.generators
    gens = np.flatnonzero(~unary_range(alg)).tolist()
    c = Closure(alg)
    c.add(gens)
    while len(c) < alg.size:
        # take the element whose closure adds the most
        best, gain = None, -1
        for a in range(alg.size):
            if c.pos[a] >= 0:
                continue
            n = len(closure(alg, c.order + [a]))
            if n > gain:
                best, gain = a, n
            if gain == alg.size:
                break
        gens.append(best)
        c.add([best])
    return tuple(gens)


# ---------------------------------------------------------------------------
# products and quotients

def product(algs: Sequence[FiniteAlgebra], cap: int = DEFAULT_PRODUCT_CAP,
            name: str | None = None) -> FiniteAlgebra:
    """Direct product; element i is the lexicographic index of its coordinates."""
    algs = list(algs)
    sig = check_signatures(*algs)
    sizes = [a.size for a in algs]
    n = int(np.prod(sizes, dtype=object))
    if n > cap:
        raise ResourceError("product size cap", cap, n)
    coords = np.stack(np.unravel_index(np.arange(n), sizes), axis=1)
    tables = []
    for i, (_, ar) in enumerate(sig):
        if ar == 0:
            tables.append(np.ravel_multi_index([int(a.tables[i]) for a in algs], sizes))
            continue
        grid = all_tuples(n, ar)
        res = [a.tables[i][tuple(coords[grid[:, p], f] for p in range(ar))] for f, a in enumerate(algs)]
        tables.append(np.ravel_multi_index(res, sizes).reshape((n,) * ar))
    return FiniteAlgebra(sig, n, tables, name or "x".join(a.name for a in algs))


def projection(prod: FiniteAlgebra, algs: Sequence[FiniteAlgebra], i: int) -> ElementMap:
    sizes = [a.size for a in algs]
    coords = np.unravel_index(np.arange(prod.size), sizes)
    return ElementMap(prod, algs[i], tuple(coords[i].tolist()))


def compatible(alg: FiniteAlgebra, theta: Partition) -> bool:
    """True if ``theta`` is compatible with every operation of ``alg``."""
    if theta.size != alg.size:
        raise ValueError("partition size differs from algebra size")
    ids = np.asarray(theta.ids, dtype=np.int64)
    reps = np.asarray(theta.representatives, dtype=np.int64)
    for t in alg.tables:
        if t.ndim == 0:
            continue
        q = ids[t[np.ix_(*[reps] * t.ndim)]]
        if not np.array_equal(q[np.ix_(*[ids] * t.ndim)], ids[t]):
            return False
    return True


def quotient(alg: FiniteAlgebra, theta: Partition, name: str | None = None) -> tuple[FiniteAlgebra, ElementMap]:
    from .errors import NotACongruenceError

    if not compatible(alg, theta):
        raise NotACongruenceError(f"{theta} is not a congruence of {alg.name}")
    ids = np.asarray(theta.ids, dtype=np.int64)
    reps = np.asarray(theta.representatives, dtype=np.int64)
    tables = [ids[t[np.ix_(*[reps] * t.ndim)]] if t.ndim else ids[t] for t in alg.tables]
    gens = None
    if alg.generators is not None:
        gens = sorted(set(int(ids[g]) for g in alg.generators))
    q = FiniteAlgebra(alg.signature, theta.num_blocks, tables, name or f"{alg.name}/~", gens)
    return q, ElementMap(alg, q, theta.ids)
