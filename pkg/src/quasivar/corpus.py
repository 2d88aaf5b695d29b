"""Named example algebras used in tests, docs and the CLI data files.

Elements are numbered from the bottom up; the comments give the usual
names.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .algebra import FiniteAlgebra, Signature

IMP_NEG = Signature.of(("imp", 2), ("neg", 1))
IMP = Signature.of(("imp", 2))
LATTICE_NEG = Signature.of(("meet", 2), ("join", 2), ("neg", 1))
BOUNDED_NEG = Signature.of(("meet", 2), ("join", 2), ("neg", 1), ("bot", 0), ("top", 0))
LATTICE_IMP = Signature.of(("meet", 2), ("join", 2), ("imp", 2))
LATTICE = Signature.of(("meet", 2), ("join", 2))
IMP_NEG_E = Signature.of(("imp", 2), ("neg", 1), ("e", 0))
IMP_E = Signature.of(("imp", 2), ("e", 0))
STAR = Signature.of(("star", 1))
CHAIN_E = Signature.of(("meet", 2), ("join", 2), ("neg", 1), ("t", 0))


def _binary(k: int, f: Callable[[int, int], int]) -> np.ndarray:
    return np.array([[f(a, b) for b in range(k)] for a in range(k)])


def _lattice_ops(leq: list[list[bool]]) -> tuple[np.ndarray, np.ndarray]:
    """Meet and join tables of a finite lattice given by its order matrix."""
    k = len(leq)

    def meet(a, b):
        lower = [c for c in range(k) if leq[c][a] and leq[c][b]]
        return next(c for c in lower if all(leq[d][c] for d in lower))

    def join(a, b):
        upper = [c for c in range(k) if leq[a][c] and leq[b][c]]
        return next(c for c in upper if all(leq[c][d] for d in upper))

    return _binary(k, meet), _binary(k, join)


def _order(k: int, covers: list[tuple[int, int]]) -> list[list[bool]]:
    leq = [[a == b for b in range(k)] for a in range(k)]
    for a, b in covers:
        leq[a][b] = True
    for m in range(k):
        for a in range(k):
            for b in range(k):
                if leq[a][m] and leq[m][b]:
                    leq[a][b] = True
    return leq


def _chain(k: int):
    return _binary(k, min), _binary(k, max)


def lukasiewicz(k: int = 3, with_neg: bool = True) -> FiniteAlgebra:
    """Ln on 0..k-1 read as 0, 1/(k-1), ..., 1: imp = min(1, 1-x+y)."""
    top = k - 1
    imp = _binary(k, lambda a, b: min(top, top - a + b))
    if with_neg:
        return FiniteAlgebra(IMP_NEG, k, [imp, [top - a for a in range(k)]], f"L{k}")
    return FiniteAlgebra(IMP, k, [imp], f"L{k}imp")


def L3() -> FiniteAlgebra:
    return lukasiewicz(3)


def L2() -> FiniteAlgebra:
    return lukasiewicz(2)


def L3_imp() -> FiniteAlgebra:
    return lukasiewicz(3, with_neg=False)


def _godel_imp(k: int) -> np.ndarray:
    return _binary(k, lambda a, b: k - 1 if a <= b else b)


def B1() -> FiniteAlgebra:
    """Three-element Stone algebra: chain with the Goedel negation."""
    m, j = _chain(3)
    return FiniteAlgebra(LATTICE_NEG, 3, [m, j, [2, 0, 0]], "B1")


def G3_plus() -> FiniteAlgebra:
    m, j = _chain(3)
    return FiniteAlgebra(LATTICE_IMP, 3, [m, j, _godel_imp(3)], "G3+")


def C3() -> FiniteAlgebra:
    """Kleene algebra on the 3-chain bot < e < top."""
    m, j = _chain(3)
    return FiniteAlgebra(BOUNDED_NEG, 3, [m, j, [2, 1, 0], 0, 2], "C3")


def C3_lattice() -> FiniteAlgebra:
    m, j = _chain(3)
    return FiniteAlgebra(LATTICE_NEG, 3, [m, j, [2, 1, 0]], "C3l")


def _diamond():
    # bot=0, a=1, b=2, top=3
    return _lattice_ops(_order(4, [(0, 1), (0, 2), (1, 3), (2, 3)]))


def D4() -> FiniteAlgebra:
    """Four-element De Morgan algebra; neg fixes the two atoms."""
    m, j = _diamond()
    return FiniteAlgebra(BOUNDED_NEG, 4, [m, j, [3, 1, 2, 0], 0, 3], "D4")


def D4_lattice() -> FiniteAlgebra:
    m, j = _diamond()
    return FiniteAlgebra(LATTICE_NEG, 4, [m, j, [3, 1, 2, 0]], "D4l")


def boolean2() -> FiniteAlgebra:
    """Two-element Boolean algebra in the De Morgan algebra signature."""
    m, j = _chain(2)
    return FiniteAlgebra(BOUNDED_NEG, 2, [m, j, [1, 0], 0, 1], "2")


def _sobocinski(k3: bool) -> np.ndarray:
    if k3:  # -1, 0, 1
        return np.array([[2, 2, 2], [0, 1, 2], [0, 0, 2]])
    return np.array([[1, 1], [0, 1]])  # -1, 1


def S3() -> FiniteAlgebra:
    return FiniteAlgebra(IMP_NEG, 3, [_sobocinski(True), [2, 1, 0]], "S3")


def S2() -> FiniteAlgebra:
    return FiniteAlgebra(IMP_NEG, 2, [_sobocinski(False), [1, 0]], "S2")


def S3_imp() -> FiniteAlgebra:
    return FiniteAlgebra(IMP, 3, [_sobocinski(True)], "S3imp")


_Z4_IMP = np.array([  # -2, -1, 1, 2
    [3, 3, 3, 3],
    [0, 2, 2, 3],
    [0, 1, 2, 3],
    [0, 0, 0, 3],
])


def Z4() -> FiniteAlgebra:
    return FiniteAlgebra(IMP_NEG_E, 4, [_Z4_IMP, [3, 2, 1, 0], 2], "Z4")


def Z4_plus() -> FiniteAlgebra:
    return FiniteAlgebra(IMP_E, 4, [_Z4_IMP, 2], "Z4+")


def P() -> FiniteAlgebra:
    """a=0, b=1, c=2, d=3; star swaps a and b and sends c, d to b."""
    return FiniteAlgebra(STAR, 4, [[1, 0, 1, 1]], "P")


def B2() -> FiniteAlgebra:
    """Four-element Boolean lattice with a new top, pseudocomplemented.

    0 = bottom, 1 = a, 2 = b, 3 = a v b, 4 = new top.
    """
    m, j = _lattice_ops(_order(5, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)]))
    return FiniteAlgebra(LATTICE_NEG, 5, [m, j, [4, 2, 1, 0, 0]], "B2")


def M5() -> FiniteAlgebra:
    """Diamond lattice M3: bottom 0, atoms 1, 2, 3, top 4."""
    m, j = _lattice_ops(_order(5, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]))
    return FiniteAlgebra(LATTICE, 5, [m, j], "M5")


def N5() -> FiniteAlgebra:
    """Pentagon: 0 < a=1 < c=2 < 4 and 0 < b=3 < 4."""
    m, j = _lattice_ops(_order(5, [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]))
    return FiniteAlgebra(LATTICE, 5, [m, j], "N5")


def C2e() -> FiniteAlgebra:
    m, j = _chain(2)
    return FiniteAlgebra(CHAIN_E, 2, [m, j, [1, 0], 1], "C2e")


def C3e() -> FiniteAlgebra:
    m, j = _chain(3)
    return FiniteAlgebra(CHAIN_E, 3, [m, j, [2, 1, 0], 1], "C3e")


def trivial(signature: Signature = IMP_NEG) -> FiniteAlgebra:
    return FiniteAlgebra(signature, 1, [np.zeros((1,) * a, dtype=np.int64) for a in signature.arities], "T")


# Table 1 rows in order: (constructor, generators used, |F|, basis size)
TABLE1 = [
    ("L3", L3, 1, 12, 6),
    ("L3imp", L3_imp, 2, 40, 3),
    ("B1", B1, 1, 6, 3),
    ("C3", C3, 1, 6, 4),
    ("C3l", C3_lattice, 2, 82, 4),
    ("S3", S3, 2, 264, 6),
    ("S3imp", S3_imp, 2, 60, 3),
    ("G3+", G3_plus, 2, 18, 3),
    ("D4l", D4_lattice, 2, 166, 8),
    ("D4", D4, 2, 168, 10),
    ("P", P, 2, 6, 3),
    ("Z4", Z4, 1, 18, 6),
    ("Z4+", Z4_plus, 2, 453, 4),
    ("B2", B2, 1, 7, 5),
    ("M5", M5, 3, 28, 5),
    ("N5", N5, 3, 99, 5),
]

BY_NAME = {name: ctor for name, ctor, *_ in TABLE1}
BY_NAME.update({"L2": L2, "S2": S2, "2": boolean2, "C2e": C2e, "C3e": C3e})
