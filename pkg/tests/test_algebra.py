from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import BINARY, all_maps, small_algebras
from quasivar import corpus
from quasivar.algebra import (
    FiniteAlgebra,
    Signature,
    generated_subalgebra,
    generator_count,
    minimal_subalgebra,
    product,
    projection,
    quotient,
)
from quasivar.congruence import all_congruences
from quasivar.errors import NotACongruenceError, ResourceError, SignatureError
from quasivar.free import free_algebra
from quasivar.homomorphism import (
    are_isomorphic,
    canonical_form,
    find_homomorphism,
    is_homomorphism,
    iter_homomorphisms,
)
from quasivar.partition import Partition
from quasivar.terms import eval_term, parse_term


def test_eval_lukasiewicz_implication():
    L3 = corpus.L3()
    assert eval_term(L3, parse_term("imp(x,x)", L3.signature), {"x": 0}) == 2


def test_eval_variable():
    A = corpus.D4()
    for e in range(A.size):
        assert eval_term(A, parse_term("x"), {"x": e}) == e


def test_eval_sobocinski_composition():
    # neg(-1) = 1 and 1 -> 0 = -1 in the printed tables
    S3 = corpus.S3()
    assert eval_term(S3, parse_term("imp(neg(x),y)", S3.signature), {"x": 0, "y": 1}) == 0


def test_eval_errors():
    L3 = corpus.L3()
    with pytest.raises(KeyError):
        eval_term(L3, parse_term("imp(x,y)"), {"x": 0})
    with pytest.raises(SignatureError):
        eval_term(L3, parse_term("meet(x,x)"), {"x": 0})


def test_algebra_validation():
    sig = Signature.of(("f", 1))
    with pytest.raises(ValueError):
        FiniteAlgebra(sig, 2, [[0, 2]])
    with pytest.raises(ValueError):
        FiniteAlgebra(sig, 2, [[0, 1, 1]])
    with pytest.raises(ValueError):
        FiniteAlgebra(sig, 0, [[]])
    with pytest.raises(SignatureError):
        Signature.of(("f", 1), ("f", 2))


def test_product_sizes():
    P = product([corpus.L3(), corpus.L2()])
    assert P.size == 6
    A = corpus.B2()
    assert are_isomorphic(product([A]), A)


def test_product_of_semilattices_by_hand():
    S = FiniteAlgebra(Signature.of(("m", 2)), 2, [[[0, 0], [0, 1]]], "S")
    P = product([S, S])
    # elements (0,0),(0,1),(1,0),(1,1); meet is coordinatewise
    expected = [[0, 0, 0, 0], [0, 1, 0, 1], [0, 0, 2, 2], [0, 1, 2, 3]]
    assert P.tables[0].tolist() == expected


def test_product_errors():
    with pytest.raises(SignatureError):
        product([corpus.L3(), corpus.D4()])
    with pytest.raises(ResourceError) as e:
        product([corpus.N5()] * 5, cap=1000)
    assert e.value.attained == 3125


def test_quotient_extremes():
    A = corpus.N5()
    top, _ = quotient(A, Partition.indiscrete(A.size))
    assert top.size == 1
    same, h = quotient(A, Partition.discrete(A.size))
    assert same == A and h.image == tuple(range(A.size))


def test_quotient_of_p_matches_free():
    P = corpus.P()
    F1 = free_algebra([P], 1).base
    three = [t for t in all_congruences(P) if t.num_blocks == 3]
    assert three
    iso = [t for t in three if are_isomorphic(quotient(P, t)[0], F1)]
    assert any(t.meet(u).is_discrete() for t in iso for u in iso)


def test_quotient_rejects_non_congruence():
    with pytest.raises(NotACongruenceError):
        quotient(corpus.L3(), Partition([0, 0, 1]))


def test_generated_subalgebra_examples():
    D4 = corpus.D4()
    sub, inc = generated_subalgebra(D4, ())
    assert sorted(inc.image) == [0, 3]
    full, inc = generated_subalgebra(D4, range(4))
    assert sorted(inc.image) == [0, 1, 2, 3]
    L3 = corpus.L3()
    _, inc = generated_subalgebra(L3, {0})
    assert sorted(inc.image) == [0, 2]


def test_generated_subalgebra_needs_seed_or_constant():
    with pytest.raises(ValueError):
        generated_subalgebra(corpus.L3(), ())


def test_minimal_subalgebra_examples():
    assert minimal_subalgebra(corpus.D4()).size == 2
    T = corpus.trivial()
    assert minimal_subalgebra(T) == T
    F = free_algebra([corpus.D4_lattice()], 1)
    M = minimal_subalgebra(F.base)
    assert M.size == 2
    sig = F.base.signature
    gen = {"x1": F.generators[0]}
    lo = eval_term(F.base, parse_term("meet(x1,neg(x1))", sig), gen)
    hi = eval_term(F.base, parse_term("join(x1,neg(x1))", sig), gen)
    small = F.base
    _, inc = generated_subalgebra(small, [lo])
    assert sorted(inc.image) == sorted([lo, hi])


def test_generator_counts_of_corpus():
    assert [generator_count(f()) for _, f, *_ in corpus.TABLE1] == [m for _, _, m, _, _ in corpus.TABLE1]


def test_surjection_from_product():
    L3 = corpus.L3()
    h = find_homomorphism(product([L3, corpus.L2()]), L3, "surjective")
    assert h is not None and h.is_surjective()


def test_identity_in_every_mode():
    A = corpus.D4()
    for mode in ("any", "injective", "surjective"):
        h = find_homomorphism(A, A, mode)
        assert h is not None and is_homomorphism(A, A, h.image)
    assert tuple(range(4)) in {h.image for h in iter_homomorphisms(A, A, "injective")}


def test_no_surjection_onto_larger():
    assert find_homomorphism(corpus.L2(), corpus.L3(), "surjective") is None


def test_homomorphism_signature_mismatch():
    with pytest.raises(SignatureError):
        find_homomorphism(corpus.L3(), corpus.D4())


def test_projections_are_surjective_homomorphisms():
    algs = [corpus.L3(), corpus.L2(), corpus.L3()]
    P = product(algs)
    for i in range(3):
        pi = projection(P, algs, i)
        assert is_homomorphism(P, algs[i], pi.image) and pi.is_surjective()


def test_fixed_images_respected():
    L3 = corpus.L3()
    P = product([L3, corpus.L2()])
    for h in iter_homomorphisms(P, L3, fixed={0: 0}):
        assert h.image[0] == 0


@given(small_algebras(max_size=3), small_algebras(max_size=3), st.sampled_from(["any", "injective", "surjective"]))
def test_search_matches_exhaustive(A, B, mode):
    def ok(img):
        if not is_homomorphism(A, B, img):
            return False
        if mode == "injective":
            return len(set(img)) == A.size
        if mode == "surjective":
            return len(set(img)) == B.size
        return True

    brute = {img for img in all_maps(A, B) if ok(img)}
    found = [h.image for h in iter_homomorphisms(A, B, mode)]
    assert len(found) == len(set(found))
    assert set(found) == brute
    first = find_homomorphism(A, B, mode)
    assert (first is None) == (not brute)


@given(small_algebras(max_size=4, signature=BINARY), small_algebras(max_size=4, signature=BINARY))
def test_injective_search_on_four_elements(A, B):
    brute = any(len(set(img)) == A.size and is_homomorphism(A, B, img) for img in all_maps(A, B))
    assert (find_homomorphism(A, B, "injective") is not None) == brute


@given(small_algebras(max_size=4), st.data())
def test_quotient_and_subalgebra_laws(A, data):
    for theta in all_congruences(A):
        Q, h = quotient(A, theta)
        assert is_homomorphism(A, Q, h.image) and h.is_surjective()
        assert h.kernel() == theta
    seed = data.draw(st.sets(st.integers(0, A.size - 1), min_size=1))
    sub, inc = generated_subalgebra(A, seed)
    assert is_homomorphism(sub, A, inc.image) and inc.is_injective()
    again = generated_subalgebra(A, inc.image)[1]
    assert set(again.image) == set(inc.image)
    extra = data.draw(st.integers(0, A.size - 1))
    bigger = generated_subalgebra(A, set(seed) | {extra})[1]
    assert set(inc.image) <= set(bigger.image)


@given(small_algebras(max_size=4), st.permutations(range(4)))
def test_canonical_form_laws(A, perm):
    perm = [p for p in perm if p < A.size]
    B = A.relabel(perm)
    c = canonical_form(A)
    assert are_isomorphic(c, A)
    assert canonical_form(c) == c
    assert canonical_form(B) == c
    assert are_isomorphic(A, B)


def test_canonical_form_large_algebras():
    # beyond the full-permutation range the refined search is used
    F = free_algebra([corpus.L3()], 1).base
    assert F.size == 12
    c = canonical_form(F)
    assert canonical_form(c) == c
    rng = np.random.default_rng(0)
    assert canonical_form(F.relabel(rng.permutation(12).tolist())) == c


def test_canonical_form_cap():
    # three disjoint copies of the same unary algebra defeat refinement
    F = free_algebra([corpus.P()], 3).base
    with pytest.raises(ResourceError):
        canonical_form(F)


def test_relabel_is_isomorphism():
    A = corpus.N5()
    perm = [4, 2, 0, 1, 3]
    B = A.relabel(perm)
    assert is_homomorphism(A, B, perm)


def test_tables_are_read_only():
    A = corpus.L3()
    with pytest.raises(ValueError):
        A.tables[0][0, 0] = 1


def test_equal_algebras_hash_equal():
    assert corpus.L3() == corpus.L3().renamed("other")
    assert len({corpus.L3(), corpus.L3()}) == 1


def test_all_pairs_of_small_corpus_isomorphism_consistent():
    algs = [f() for _, f, *_ in corpus.TABLE1 if f().size <= 4]
    for A, B in itertools.combinations(algs, 2):
        if A.signature == B.signature and A.size == B.size:
            assert are_isomorphic(A, B) == (canonical_form(A) == canonical_form(B))
