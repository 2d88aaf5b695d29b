from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_rule
from quasivar import corpus
from quasivar.algebra import product
from quasivar.free import free_algebra
from quasivar.homomorphism import iter_homomorphisms
from quasivar.logics import Logic, consequence, find_counterexample, logic_star, reduced_logic, rule_admissible
from quasivar.terms import eval_term, parse_rule, parse_term

SIG = corpus.L3().signature


def luk3():
    return Logic(corpus.L3(), [2])


def j3():
    return Logic(corpus.L3(), [1, 2])


def iso_logics(L, M):
    """A bijective homomorphism carrying designated values exactly onto designated values."""
    if L.size != M.size or len(L.designated) != len(M.designated):
        return False
    for h in iter_homomorphisms(L.algebra, M.algebra, "injective"):
        if {h.image[d] for d in L.designated} == set(M.designated):
            return True
    return False


def test_logic_validation():
    with pytest.raises(ValueError):
        Logic(corpus.L3(), [3])
    assert Logic(corpus.L3(), []).mask().sum() == 0


def test_consequence_examples():
    L = luk3()
    x = parse_term("x", SIG)
    assert consequence(L, [x], x)
    mp = parse_rule("x, imp(x,y) / y", SIG)
    assert consequence(L, mp.premises, mp.conclusion)
    # in J3 modus ponens fails: x = 1/2, y = 0
    assert find_counterexample(j3(), mp.premises, mp.conclusion) == {"x": 1, "y": 0}
    assert luk3().algebra == j3().algebra and luk3().designated != j3().designated


def test_star_of_trivial_logic():
    T = corpus.trivial()
    S = logic_star(Logic(T, [0]))
    assert S.size == 1 and S.designated == {0}
    R = reduced_logic(Logic(T, [0]))
    assert R.size == 1


def test_star_of_luk3():
    S = logic_star(luk3(), generators=1)
    assert S.size == 12 and S.designated
    # the class of x -> x is designated
    F = free_algebra([corpus.L3()], 1)
    e = eval_term(F.base, parse_term("imp(x1,x1)", SIG), {"x1": F.generators[0]})
    assert e in S.designated


def test_star_designation_is_theoremhood():
    L = luk3()
    F = free_algebra([L.algebra], 1)
    S = logic_star(L, generators=1)
    for e in range(F.size):
        w = F.witness(e)
        theorem = all(eval_term(L.algebra, w, {"x1": v}) in L.designated for v in range(3))
        assert (e in S.designated) == theorem


def test_reduced_logics():
    R = reduced_logic(luk3())
    assert R.size == 6 and len(R.designated) == 1
    assert iso_logics(R, Logic(product([corpus.L3(), corpus.L2()]), [2 * 2 + 1]))
    R = reduced_logic(j3())
    assert R.size == 6 and len(R.designated) == 2
    assert iso_logics(R, Logic(product([corpus.L3(), corpus.L2()]), [1 * 2 + 1, 2 * 2 + 1]))


def test_reduced_logic_is_a_sublogic():
    L = luk3()
    S = logic_star(L)
    R = reduced_logic(L)
    hits = [h for h in iter_homomorphisms(R.algebra, S.algebra, "injective")
            if {e for e in range(R.size) if h.image[e] in S.designated} == set(R.designated)]
    assert hits
    onto = [h for h in iter_homomorphisms(R.algebra, L.algebra, "surjective")
            if all(h.image[d] in L.designated for d in R.designated)]
    assert onto


def test_rule_examples():
    L = luk3()
    assert rule_admissible(L, parse_rule("x / x", SIG))
    r = parse_rule("imp(neg(x),x) / x", SIG)
    six = Logic(product([corpus.L3(), corpus.L2()]), [5])
    assert rule_admissible(L, r) == consequence(six, r.premises, r.conclusion)
    assert rule_admissible(L, r, via="star") == rule_admissible(L, r)
    with pytest.raises(ValueError):
        rule_admissible(L, r, via="other")


def test_j3_rules_decided_by_the_six_element_logic():
    six = Logic(product([corpus.L3(), corpus.L2()]), [3, 5])
    rng = random.Random(11)
    for _ in range(20):
        r = random_rule(rng, SIG)
        assert rule_admissible(j3(), r) == consequence(six, r.premises, r.conclusion)


@settings(max_examples=50)
@given(st.sampled_from(["luk", "j"]), st.integers(0, 10**6))
def test_star_and_reduced_routes_agree(which, seed):
    L = luk3() if which == "luk" else j3()
    r = random_rule(random.Random(seed), SIG)
    assert rule_admissible(L, r, "star") == rule_admissible(L, r, "reduced")


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_derivable_rules_are_admissible(seed):
    L = luk3()
    r = random_rule(random.Random(seed), SIG)
    if consequence(L, r.premises, r.conclusion):
        assert rule_admissible(L, r)
