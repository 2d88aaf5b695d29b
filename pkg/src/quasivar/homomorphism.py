"""Homomorphism search, isomorphism tests and canonical forms."""

from __future__ import annotations

import itertools
import math
from typing import Iterator, Mapping, Sequence

import numpy as np

from .algebra import Closure, ElementMap, FiniteAlgebra, check_signatures, greedy_generators, iter_new_tuples
from .errors import ResourceError

MODES = ("any", "injective", "surjective")

# entries of a (candidates x tuples) comparison block
_BLOCK = 1 << 22
# cached stage tuples per plan, in entries
_TUPLE_CACHE = 1 << 23


class _Plan:
    """Stages of a generating sequence of the source algebra.

    Stage 0 is the closure of the constants; stage j > 0 adds one generator
    and everything it newly generates.  Each new element carries a recipe
    ``(op, argument positions)`` so its image can be computed from earlier
    images, and each stage knows the argument tuples that must be checked
    once its images are known (those with some argument inside the stage).
    """

    def __init__(self, A: FiniteAlgebra, gens: Sequence[int]):
        cl = Closure(A)
        cl.add([])
        stages = [(None, 0, len(cl))]
        for g in gens:
            g = int(g)
            if cl.pos[g] >= 0:
                continue
            s = len(cl)
            cl.add([g])
            stages.append((g, s, len(cl)))
        if len(cl) != A.size:
            raise ValueError("given generators do not generate the source algebra")
        self.A = A
        self.stages = stages
        self.order = np.asarray(cl.order, dtype=np.int64)
        self.pos = cl.pos.copy()
        self.recipes = []
        for rec in cl.recipes:
            if rec is None:
                self.recipes.append(None)
            else:
                op, args = rec
                self.recipes.append((op, tuple(int(self.pos[a]) for a in args)))
        self._cache: dict[int, list] = {}
        self._cached_entries = 0

    def checks(self, j: int):
        """Yield ``(op, tuples, result positions)`` blocks for stage j."""
        if j in self._cache:
            yield from self._cache[j]
            return
        _, s, e = self.stages[j]
        blocks = []
        keep = True
        for op, t in enumerate(self.A.tables):
            if t.ndim == 0:
                continue
            for tup in iter_new_tuples(s, e, t.ndim, chunk=1 << 18):
                res = self.pos[t[tuple(self.order[tup].T)]]
                blk = (op, tup, res)
                if keep:
                    self._cached_entries += tup.size
                    if self._cached_entries > _TUPLE_CACHE:
                        keep = False
                        blocks = []
                    else:
                        blocks.append(blk)
                yield blk
        if keep:
            self._cache[j] = blocks


_plans: dict = {}


def _plan_for(A: FiniteAlgebra) -> _Plan:
    key = (A.key, A.generators)
    plan = _plans.get(key)
    if plan is None:
        plan = _Plan(A, greedy_generators(A))
        if len(_plans) > 256:
            _plans.clear()
        _plans[key] = plan
    return plan


def iter_homomorphisms(
    A: FiniteAlgebra,
    B: FiniteAlgebra,
    mode: str = "any",
    fixed: Mapping[int, int] | None = None,
) -> Iterator[ElementMap]:
    """All homomorphisms A -> B of the given mode, in a deterministic order.

    Backtracks over images of a generating sequence of A, testing all
    candidate images of one generator at once.  ``fixed`` pins the images of
    some elements of A.
    """
    check_signatures(A, B)
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if mode == "injective" and A.size > B.size:
        return
    if mode == "surjective" and A.size < B.size:
        return
    plan = _plan_for(A)
    yield from _search(plan, B, mode, dict(fixed or {}))


def _search(plan: _Plan, B: FiniteAlgebra, mode: str, fixed: dict) -> Iterator[ElementMap]:
    A = plan.A
    n = A.size
    btabs = B.tables
    img = np.full(n, -1, dtype=np.int64)
    fixed_pos = {int(plan.pos[a]): int(b) for a, b in fixed.items()}
    injective = mode == "injective"
    surjective = mode == "surjective"
    used = np.zeros(B.size, dtype=bool)
    stages = plan.stages

    def stage_images(j, cands):
        _, s, e = stages[j]
        C = len(cands)
        out = np.empty((C, e - s), dtype=np.int64)
        for p in range(s, e):
            rec = plan.recipes[p]
            if rec is None:
                out[:, p - s] = cands
                continue
            op, args = rec
            if not args:
                out[:, p - s] = int(btabs[op])
                continue
            cols = tuple(out[:, a - s] if a >= s else np.full(C, img[a]) for a in args)
            out[:, p - s] = btabs[op][cols]
        return out

    def survivors(j, cands):
        _, s, e = stages[j]
        out = stage_images(j, cands)
        ok = np.ones(len(cands), dtype=bool)
        for p, v in fixed_pos.items():
            if s <= p < e:
                ok &= out[:, p - s] == v
        if injective:
            ok &= ~used[out].any(axis=1)
            if e - s > 1:
                srt = np.sort(out, axis=1)
                ok &= ~(srt[:, 1:] == srt[:, :-1]).any(axis=1)
        if not ok.any():
            return cands[:0], out[:0]
        cands, out = cands[ok], out[ok]
        full = np.empty((len(cands), e), dtype=np.int64)
        full[:, :s] = img[:s]
        full[:, s:] = out
        for op, tup, res in plan.checks(j):
            if not len(cands):
                break
            step = max(1, _BLOCK // max(1, len(cands)))
            for c0 in range(0, len(tup), step):
                tt = tup[c0:c0 + step]
                lhs = btabs[op][tuple(full[:, tt[:, q]] for q in range(tt.shape[1]))]
                good = (lhs == full[:, res[c0:c0 + step]]).all(axis=1)
                if not good.all():
                    cands, out, full = cands[good], out[good], full[good]
                    if not len(cands):
                        break
        if surjective and len(cands):
            covered_prefix = used.copy()
            rem = n - e
            keep = np.ones(len(cands), dtype=bool)
            for i in range(len(cands)):
                cov = covered_prefix.copy()
                cov[out[i]] = True
                keep[i] = B.size - int(cov.sum()) <= rem
            cands, out = cands[keep], out[keep]
        return cands, out

    def rec(j):
        g, s, e = stages[j]
        if g is None:
            cands = np.zeros(1, dtype=np.int64)
        else:
            p = s
            if p in fixed_pos:
                cands = np.asarray([fixed_pos[p]], dtype=np.int64)
            else:
                cands = np.arange(B.size, dtype=np.int64)
                if injective:
                    cands = cands[~used]
        cands, outs = survivors(j, cands)
        for i in range(len(cands)):
            img[s:e] = outs[i]
            newly = outs[i][~used[outs[i]]]
            used[newly] = True
            if j + 1 < len(stages):
                yield from rec(j + 1)
            elif not surjective or used.all():
                image = np.empty(n, dtype=np.int64)
                image[plan.order] = img
                yield ElementMap(A, B, tuple(image.tolist()))
            used[newly] = False
        img[s:e] = -1

    yield from rec(0)


def find_homomorphism(A: FiniteAlgebra, B: FiniteAlgebra, mode: str = "any",
                      fixed: Mapping[int, int] | None = None) -> ElementMap | None:
    return next(iter_homomorphisms(A, B, mode, fixed), None)


def embeds(A: FiniteAlgebra, B: FiniteAlgebra) -> bool:
    return find_homomorphism(A, B, "injective") is not None


def is_homomorphism(A: FiniteAlgebra, B: FiniteAlgebra, image: Sequence[int]) -> bool:
    """Pointwise check of the homomorphism law on every table entry."""
    check_signatures(A, B)
    h = np.asarray(image, dtype=np.int64)
    if h.shape != (A.size,) or (h.size and (h.min() < 0 or h.max() >= B.size)):
        return False
    for ta, tb in zip(A.tables, B.tables):
        if ta.ndim == 0:
            if h[int(ta)] != int(tb):
                return False
            continue
        if not np.array_equal(tb[np.ix_(*[h] * ta.ndim)], h[ta]):
            return False
    return True


def are_isomorphic(A: FiniteAlgebra, B: FiniteAlgebra) -> bool:
    check_signatures(A, B)
    if A.size != B.size:
        return False
    if A == B:
        return True
    return find_homomorphism(A, B, "injective") is not None


# ---------------------------------------------------------------------------
# canonical forms

FULL_SEARCH_MAX = 8
PERMUTATION_CAP = 200_000
_PERM_CHUNK = 4096


def _codes(A: FiniteAlgebra, perms: np.ndarray) -> np.ndarray:
    """Concatenated relabelled tables, one row per permutation (old -> new)."""
    P = len(perms)
    invs = np.argsort(perms, axis=1)
    parts = []
    for t in A.tables:
        r = t.ndim
        if r == 0:
            parts.append(perms[:, int(t)][:, None])
            continue
        idx = []
        for q in range(r):
            shape = [P] + [1] * r
            shape[q + 1] = A.size
            idx.append(invs.reshape(shape))
        vals = t[tuple(idx)].reshape(P, -1)
        parts.append(np.take_along_axis(perms, vals, axis=1))
    return np.concatenate(parts, axis=1)


def _lex_min_row(rows: np.ndarray) -> int:
    idx = np.arange(len(rows))
    for c in range(rows.shape[1]):
        col = rows[idx, c]
        idx = idx[col == col.min()]
        if len(idx) == 1:
            break
    return int(idx[0])


def _refined_classes(A: FiniteAlgebra) -> list[list[int]]:
    """Isomorphism-invariant ordered partition by iterated colour refinement."""
    k = A.size
    colour = np.zeros(k, dtype=np.int64)
    for t in A.tables:
        if t.ndim == 0:
            colour[int(t)] = 1
    _, colour = np.unique(colour, return_inverse=True)
    ncol = int(colour.max()) + 1
    while True:
        feats = [colour[:, None]]
        for t in A.tables:
            r = t.ndim
            if r == 0:
                continue
            diag = t[tuple([np.arange(k)] * r)]
            feats.append(colour[diag][:, None])
            feats.append((diag == np.arange(k)).astype(np.int64)[:, None])
            if k ** r > 1 << 22:
                continue
            for p in range(r):
                moved = np.moveaxis(t, p, 0).reshape(k, -1)
                res = colour[moved]
                if r > 1:
                    others = np.indices((k,) * (r - 1)).reshape(r - 1, -1)
                    code = np.zeros(others.shape[1], dtype=np.int64)
                    for q in range(r - 1):
                        code = code * ncol + colour[others[q]]
                    res = res * (ncol ** (r - 1)) + code[None, :]
                feats.append(np.sort(res, axis=1))
        rows = np.concatenate(feats, axis=1)
        _, new = np.unique(rows, axis=0, return_inverse=True)
        new = new.ravel()
        n_new = int(new.max()) + 1
        if n_new == ncol:
            break
        colour, ncol = new, n_new
    return [np.flatnonzero(colour == c).tolist() for c in range(ncol)]


def _consistent_perms(classes: list[list[int]], k: int) -> Iterator[np.ndarray]:
    """Chunks of permutations sending class i onto its own label block."""
    offsets = np.cumsum([0] + [len(c) for c in classes])
    per_class = [list(itertools.permutations(range(len(c)))) for c in classes]
    buf = []
    for choice in itertools.product(*per_class):
        perm = np.empty(k, dtype=np.int64)
        for cls, off, arrangement in zip(classes, offsets, choice):
            for x, slot in zip(cls, arrangement):
                perm[x] = off + slot
        buf.append(perm)
        if len(buf) >= _PERM_CHUNK:
            yield np.stack(buf)
            buf = []
    if buf:
        yield np.stack(buf)


def canonical_labelling(A: FiniteAlgebra) -> tuple[int, ...]:
    """A permutation (old -> new) producing the canonical form."""
    k = A.size
    if k <= FULL_SEARCH_MAX:
        chunks = (np.asarray(c, dtype=np.int64)
                  for c in itertools.islice(_batched(itertools.permutations(range(k)), _PERM_CHUNK), None))
    else:
        classes = _refined_classes(A)
        count = math.prod(math.factorial(len(c)) for c in classes)
        if count > PERMUTATION_CAP:
            raise ResourceError("canonical form permutation cap", PERMUTATION_CAP, count, A.name)
        chunks = _consistent_perms(classes, k)
    best_code, best_perm = None, None
    for perms in chunks:
        codes = _codes(A, perms)
        i = _lex_min_row(codes)
        if best_code is None or tuple(codes[i]) < best_code:
            best_code, best_perm = tuple(codes[i].tolist()), perms[i]
    return tuple(int(x) for x in best_perm)


def _batched(it, n):
    while True:
        chunk = list(itertools.islice(it, n))
        if not chunk:
            return
        yield chunk


def canonical_form(A: FiniteAlgebra) -> FiniteAlgebra:
    """Lexicographically least relabelling (tables in signature order)."""
    perm = canonical_labelling(A)
    c = A.relabel(perm)
    return FiniteAlgebra(c.signature, c.size, c.tables, A.name)
