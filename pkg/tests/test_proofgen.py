import random
from collections import Counter

import pytest

from gen import perturbed_pairs, random_pairs
from rexproof.calculus import (BOTTOM, Eq, FormulaKind, ProofStep, RuleId, Sync,
                               check_proof_tree, step_count, walk)
from rexproof.equivalence import equiv
from rexproof.proofgen import (NotEquivalent, bookend, dedup_and_prune, normalize_proof,
                               proof_gen, prove, refl, subst)
from rexproof.terms import alt, char, normalize, parse_regex, star

R = RuleId
AL = ["a", "b"]


def P(t, al=AL):
    return parse_regex(t, al)


def rules_of(root):
    return Counter(st.rule for st in walk(root))


def test_worked_example_skeleton():
    p, q = P("(a*a)*", ["a"]), P("a*", ["a"])
    raw = proof_gen(p, q, 1)
    assert raw.conclusion is Eq(p, q)
    used = rules_of(raw)
    for r in (R.SyncCycle, R.SyncInit, R.SyncStep, R.CoinductFinish, R.SyncEmpty,
              R.AgreeInit, R.MatchFinish):
        assert used[r] >= 1, r
    cycles = [st for st in walk(raw) if st.rule is R.SyncCycle]
    assert {st.conclusion.s for st in cycles} == {(0,)}
    assert check_proof_tree(bookend(raw), 1).ok


def test_reflexive_pair():
    p = P("(a|b)*")
    raw = proof_gen(p, p, 2)
    assert raw.rule is R.Refl
    root = bookend(raw)
    assert step_count(root) == 3
    assert check_proof_tree(root, 2).ok


def test_union_commutation_uses_normalization():
    p, q = P("a|b"), P("b|a")
    root = prove(p, q, 2)
    assert check_proof_tree(root, 2).ok
    assert rules_of(root)[R.UnionComm] >= 1


def test_inequivalent_pair_reported():
    with pytest.raises(NotEquivalent):
        proof_gen(P("a*"), P("(ab)*"), 2)


def test_trace_follows_equiv():
    for p, q in random_pairs(31, 600) + perturbed_pairs(32, 40):
        if not equiv(p, q, 2):
            continue
        t1, t2 = [], []
        equiv(p, q, 2, trace=t1)
        proof_gen(p, q, 2, trace=t2)
        assert t1 == t2


def test_subst_examples():
    a, s = char(0), star(char(0))
    r1, r2 = alt(a, s), alt(s, a)
    core = ProofStep(R.Refl, (), Sync((0,), r1, s))
    eq = ProofStep(R.UnionComm, (), Eq(r1, r2))
    out = subst(core, eq, None)
    assert out.conclusion is Sync((0,), r2, s)
    assert out.rule is R.PredCongL
    same = refl(s)
    assert subst(same, None, None) is same
    with pytest.raises(ValueError):
        subst(core, ProofStep(R.Refl, (), Eq(s, s)), None)


def test_normalize_proof_concludes_normal_form():
    rng = random.Random(33)
    from gen import random_regex
    for _ in range(300):
        p = random_regex(rng, 4)
        t, pf = normalize_proof(p)
        assert t is normalize(p)
        if pf is None:
            assert t is p
        else:
            assert pf.conclusion is Eq(p, t)
            assert check_proof_tree(bookend(pf), 2).ok


def test_dedup_shares_duplicate_conclusions():
    a = char(0)
    left = ProofStep(R.Refl, (), Eq(a, a))
    right = ProofStep(R.Refl, (), Eq(a, a))
    top = ProofStep(R.Trans, (left, right), Eq(a, a))
    out = dedup_and_prune(top)
    assert step_count(out) == 1


def test_dedup_round_trip_and_uniqueness():
    for p, q in random_pairs(34, 800) + perturbed_pairs(35, 60):
        if not equiv(p, q, 2):
            continue
        raw = proof_gen(p, q, 2)
        d = dedup_and_prune(raw)
        assert step_count(d) <= step_count(raw)
        concl = [st.conclusion for st in walk(d)]
        assert len(concl) == len(set(concl))
        v = check_proof_tree(bookend(d), 2)
        assert v.ok, v.reason
        assert v.assumption.kind is FormulaKind.NEQ
        assert equiv(v.assumption.p, v.assumption.q, 2)


def test_dedup_is_deterministic():
    p, q = P("(a|b)*"), P("(a*b*)*")
    a = [(s.rule, s.conclusion) for s in walk(prove(p, q, 2))]
    b = [(s.rule, s.conclusion) for s in walk(prove(p, q, 2))]
    assert a == b


def test_bookend_shape():
    p = P("a")
    root = bookend(refl(p))
    assert root.conclusion is BOTTOM and root.rule is R.Contra
    assert root.premises[0].rule is R.Assume
    with pytest.raises(ValueError):
        bookend(root)
