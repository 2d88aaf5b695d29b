"""Equivalence relations on 0..k-1 stored as normalized block-id tuples."""

from __future__ import annotations

from typing import Iterable, Sequence


def _normalize(ids: Iterable[int]) -> tuple[int, ...]:
    relabel: dict[int, int] = {}
    out = []
    for x in ids:
        if x not in relabel:
            relabel[x] = len(relabel)
        out.append(relabel[x])
    return tuple(out)


class Partition:
    """An equivalence relation on ``range(size)``.

    Block ids appear in increasing order of first occurrence, so two equal
    partitions always carry identical ``ids`` tuples and block ``b`` has
    least representative ``representatives[b]``.
    """

    __slots__ = ("ids", "_hash")

    def __init__(self, ids: Sequence[int]):
        self.ids = _normalize(int(x) for x in ids)
        self._hash = hash(self.ids)

    @classmethod
    def discrete(cls, size: int) -> Partition:
        return cls(range(size))

    @classmethod
    def indiscrete(cls, size: int) -> Partition:
        return cls([0] * size)

    @classmethod
    def from_blocks(cls, size: int, blocks: Iterable[Iterable[int]]) -> Partition:
        ids = list(range(size))
        for i, block in enumerate(blocks):
            for x in block:
                ids[x] = size + i
        return cls(ids)

    @property
    def size(self) -> int:
        return len(self.ids)

    @property
    def num_blocks(self) -> int:
        return max(self.ids) + 1 if self.ids else 0

    @property
    def representatives(self) -> tuple[int, ...]:
        seen = {}
        for x, b in enumerate(self.ids):
            seen.setdefault(b, x)
        return tuple(seen[b] for b in range(self.num_blocks))

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for x, b in enumerate(self.ids):
            out[b].append(x)
        return out

    def related(self, a: int, b: int) -> bool:
        return self.ids[a] == self.ids[b]

    def pairs(self) -> list[tuple[int, int]]:
        """Generating pairs: each element linked to its block representative."""
        reps = self.representatives
        return [(reps[b], x) for x, b in enumerate(self.ids) if reps[b] != x]

    def is_discrete(self) -> bool:
        return self.num_blocks == self.size

    def is_indiscrete(self) -> bool:
        return self.num_blocks <= 1

    def __le__(self, other: Partition) -> bool:
        if self.size != other.size:
            raise ValueError("partitions over different universes")
        image: dict[int, int] = {}
        for b, c in zip(self.ids, other.ids):
            if image.setdefault(b, c) != c:
                return False
        return True

    def meet(self, other: Partition) -> Partition:
        if self.size != other.size:
            raise ValueError("partitions over different universes")
        return Partition(_normalize(zip(self.ids, other.ids)))

    def join(self, other: Partition) -> Partition:
        if self.size != other.size:
            raise ValueError("partitions over different universes")
        parent = list(range(self.size))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for part in (self, other):
            for a, b in part.pairs():
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        return Partition(find(x) for x in range(self.size))

    def __eq__(self, other):
        return isinstance(other, Partition) and self.ids == other.ids

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "Partition(" + "|".join(",".join(map(str, b)) for b in self.blocks()) + ")"
