"""Minimal generating sets of finitely generated quasivarieties."""

from __future__ import annotations

from collections import Counter
from typing import Iterable

from .algebra import FiniteAlgebra, check_signatures, quotient
from .congruence import all_congruences, meet_all
from .homomorphism import are_isomorphic, find_homomorphism
from .partition import Partition


def multiset_leq(m1: Iterable[int], m2: Iterable[int]) -> bool:
    """Dershowitz-Manna ordering: every excess in m1 is dominated by a larger excess in m2."""
    f, g = Counter(m1), Counter(m2)
    for x in f:
        if f[x] > g[x] and not any(y > x and g[y] > f[y] for y in g):
            return False
    return True


def card_multiset(algs: Iterable[FiniteAlgebra]) -> list[int]:
    return sorted(a.size for a in algs)


class EmbeddingCache:
    """Memoized embedding tests keyed by table identity."""

    def __init__(self):
        self._memo: dict = {}

    def embeds(self, A: FiniteAlgebra, B: FiniteAlgebra) -> bool:
        if A.size > B.size:
            return False
        key = (A.key, B.key)
        hit = self._memo.get(key)
        if hit is None:
            hit = A == B or find_homomorphism(A, B, "injective") is not None
            self._memo[key] = hit
        return hit

    def embeds_into_any(self, A: FiniteAlgebra, targets: Iterable[FiniteAlgebra]) -> bool:
        return any(self.embeds(A, B) for B in targets)


_default_cache = EmbeddingCache()


def _nontrivial_congruences(A: FiniteAlgebra) -> list[Partition]:
    delta = Partition.discrete(A.size)
    return sorted((t for t in all_congruences(A) if t != delta), key=lambda t: (t.num_blocks, t.ids))


def is_q_subdirectly_irreducible(A: FiniteAlgebra, K: Iterable[FiniteAlgebra],
                                 cache: EmbeddingCache | None = None) -> bool:
    """Meet of the non-trivial congruences with quotient in IS(K) differs from Delta."""
    cache = cache or _default_cache
    K = list(K)
    if A.size == 1:
        return False
    good = [t for t in _nontrivial_congruences(A) if cache.embeds_into_any(quotient(A, t)[0], K)]
    return not meet_all(good, A.size).is_discrete()


def min_gen_set(K: Iterable[FiniteAlgebra], cache: EmbeddingCache | None = None) -> list[FiniteAlgebra]:
    """The minimal generating set of Q(K), one representative per isomorphism type."""
    cache = cache or _default_cache
    M = list(K)
    if not M:
        return []
    check_signatures(*M)
    i = 0
    while i < len(M):
        A = M[i]
        others = M[:i] + M[i + 1:]
        s1, s2 = [], []
        quotients = {}
        for theta in _nontrivial_congruences(A):
            Q = quotient(A, theta)[0]
            quotients[theta] = Q
            if cache.embeds_into_any(Q, others):
                s2.append(theta)
            elif cache.embeds(Q, A):
                s1.append(theta)
        # s1 here is S1 minus S2; their union is what the meet needs
        if meet_all(s1 + s2, A.size).is_discrete():
            added: list[FiniteAlgebra] = []
            for theta in sorted(s1, key=lambda t: (t.num_blocks, t.ids)):
                Q = quotients[theta]
                if not any(Q.size == B.size and are_isomorphic(Q, B) for B in added):
                    added.append(Q.renamed(f"{A.name}/{len(added) + 1}" if len(s1) > 1 else f"{A.name}/~"))
            M = others + added
        else:
            i += 1
    j = 0
    while j < len(M):
        A = M[j]
        if cache.embeds_into_any(A, M[:j] + M[j + 1:]):
            M.pop(j)
        else:
            j += 1
    return M

