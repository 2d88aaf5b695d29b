"""Congruences: closures of pair sets, the full set Con(A), meets."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .algebra import FiniteAlgebra, compatible
from .partition import Partition

__all__ = [
    "Partition",
    "congruence_closure",
    "principal_congruences",
    "all_congruences",
    "meet_all",
    "is_congruence",
]


def is_congruence(alg: FiniteAlgebra, theta: Partition) -> bool:
    return compatible(alg, theta)


def congruence_closure(alg: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Partition:
    """Least congruence containing ``pairs``.

    Union-find over the universe.  Every union performed is pushed on a work
    list and translated through each argument position of each operation;
    the translated pairs are merged in turn until nothing changes.
    """
    k = alg.size
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    work = []

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
            work.append((a, b))

    for a, b in pairs:
        a, b = int(a), int(b)
        if not (0 <= a < k and 0 <= b < k):
            raise ValueError(f"pair ({a}, {b}) outside universe 0..{k - 1}")
        union(a, b)

    ops = [t for t in alg.tables if t.ndim > 0]
    while work:
        a, b = work.pop()
        for t in ops:
            for p in range(t.ndim):
                xs = np.take(t, a, axis=p).ravel()
                ys = np.take(t, b, axis=p).ravel()
                diff = xs != ys
                if not diff.any():
                    continue
                for x, y in set(zip(xs[diff].tolist(), ys[diff].tolist())):
                    union(x, y)
    return Partition([find(x) for x in range(k)])


def principal_congruences(alg: FiniteAlgebra) -> dict[tuple[int, int], Partition]:
    """Cg(a, b) for every pair a < b."""
    out = {}
    for a in range(alg.size):
        for b in range(a + 1, alg.size):
            out[(a, b)] = congruence_closure(alg, [(a, b)])
    return out


def all_congruences(alg: FiniteAlgebra) -> set[Partition]:
    """Con(A): Delta together with all joins of principal congruences."""
    principals = list(dict.fromkeys(principal_congruences(alg).values()))
    delta = Partition.discrete(alg.size)
    seen = {delta}
    frontier = [delta]
    while frontier:
        nxt = []
        for theta in frontier:
            for pi in principals:
                if pi <= theta:
                    continue
                j = theta.join(pi)
                if j not in seen:
                    seen.add(j)
                    nxt.append(j)
        frontier = nxt
    return seen


def meet_all(partitions: Iterable[Partition], size: int | None = None) -> Partition:
    """Intersection of the partitions; the empty meet is the full relation.

    ``size`` is needed only to build the full relation for an empty input.
    """
    parts = list(partitions)
    if not parts:
        if size is None:
            raise ValueError("meet of no partitions needs the universe size")
        return Partition.indiscrete(size)
    n = parts[0].size
    if size is not None and size != n or any(p.size != n for p in parts):
        raise ValueError("partitions over different universes")
    ids = np.asarray([p.ids for p in parts], dtype=np.int64).T
    _, inv = np.unique(ids, axis=0, return_inverse=True)
    return Partition(inv.ravel().tolist())
