"""Proof generation by derivative search, plus post-processing.

Intermediate helpers pass around "equality proofs" that may be ``None``,
meaning the two sides are the same term and no step is needed.

Coinduction bookkeeping: let ``P0, Q0`` be the normalized inputs and, at
search depth ``m`` along path ``s``, let ``D_m P0`` be the literal chain
``δ_{s[m-1]}(... δ_{s[0]}(P0))``.  Every node carries proofs that
``D_m P0`` and ``D_m Q0`` equal its normalized pair.  Sync formulas are
always stated over such chains, so SyncFold and the chain scans line up
without substituting inside a Sync.
"""

from __future__ import annotations

from typing import Optional

from .calculus import (BOTTOM, Agree, Eq, FormulaKind, Neq, ProofStep, RuleId,
                       Sync, SyncUpTo, walk)
from .equivalence import DEFAULT_BUDGET, BudgetExceeded
from .terms import (BLANK, EMPTY, Kind, Term, alt, cat, der, der_chain,
                    derive_char, eps, nullable, normalize, term_compare)

R = RuleId


class NotEquivalent(ValueError):
    """The inputs disagree on some string; no proof exists."""


# ------------------------------------------------------- equality glue

def _step(rule, prems, concl):
    return ProofStep(rule, prems, concl)


def refl(t: Term) -> ProofStep:
    return _step(R.Refl, (), Eq(t, t))


def symm(pf: Optional[ProofStep]) -> Optional[ProofStep]:
    if pf is None:
        return None
    if pf.rule is R.Symm:
        return pf.premises[0]
    f = pf.conclusion
    return _step(R.Symm, (pf,), Eq(f.q, f.p))


def trans(*pfs: Optional[ProofStep]) -> Optional[ProofStep]:
    acc = None
    for pf in pfs:
        if pf is None:
            continue
        if acc is None:
            acc = pf
            continue
        a, b = acc.conclusion, pf.conclusion
        if a.q is not b.p:
            raise AssertionError("trans: middle terms differ")
        acc = _step(R.Trans, (acc, pf), Eq(a.p, b.q))
    return acc


def cong1(kind: Kind, imm: int, pf: Optional[ProofStep]) -> Optional[ProofStep]:
    """From ``x = x'`` build ``f(x) = f(x')`` for a unary constructor."""
    if pf is None:
        return None
    f = pf.conclusion
    return _step(R.FunCong1, (pf,),
                 Eq(Term(kind, imm, f.p), Term(kind, imm, f.q)))


def cong2(kind: Kind, x: Term, px: Optional[ProofStep],
          y: Term, py: Optional[ProofStep]) -> Optional[ProofStep]:
    """From ``x = x'`` and ``y = y'`` build ``f(x, y) = f(x', y')``."""
    if px is None and py is None:
        return None
    px = px or refl(x)
    py = py or refl(y)
    a, b = px.conclusion, py.conclusion
    return _step(R.FunCong2, (px, py),
                 Eq(Term(kind, 0, a.p, b.p), Term(kind, 0, a.q, b.q)))


def _rhs(t: Term, pf: Optional[ProofStep]) -> Term:
    return t if pf is None else pf.conclusion.q


def subst(core: ProofStep, lhs_eq: Optional[ProofStep],
          rhs_eq: Optional[ProofStep]) -> ProofStep:
    """Rewrite the term slots of ``core``'s conclusion by two equalities.

    ``core`` concludes ``P(x, y)``; ``lhs_eq`` proves ``x = x'`` and
    ``rhs_eq`` proves ``y = y'`` (``None`` for no change).  The result
    concludes ``P(x', y')``.
    """
    out = core
    for rule, eq in ((R.PredCongL, lhs_eq), (R.PredCongR, rhs_eq)):
        if eq is None:
            continue
        f, e = out.conclusion, eq.conclusion
        if f.kind is FormulaKind.BOTTOM:
            raise ValueError("subst: ⊥ has no term slots")
        if rule is R.PredCongL:
            if f.p is not e.p:
                raise ValueError("subst: left equality does not match")
            new = type(f)(f.kind, f.k, f.s, e.q, f.q)
        else:
            if f.q is not e.p:
                raise ValueError("subst: right equality does not match")
            new = type(f)(f.kind, f.k, f.s, f.p, e.q)
        out = _step(rule, (out, eq), new)
    return out


# ------------------------------------------------ epsilon and derivatives

def eps_proof(x: Term):
    """``(v, pf)`` with ``pf : E(x) = v`` and ``v`` in {ε, ∅}; ``x`` regular."""
    k = x.kind
    if k is Kind.EMPTY:
        return EMPTY, _step(R.EpsilonEmpty, (), Eq(eps(x), EMPTY))
    if k is Kind.BLANK:
        return BLANK, _step(R.EpsilonBlank, (), Eq(eps(x), BLANK))
    if k is Kind.CHAR:
        return EMPTY, _step(R.EpsilonChar, (), Eq(eps(x), EMPTY))
    if k is Kind.STAR:
        return BLANK, _step(R.EpsilonStar, (), Eq(eps(x), BLANK))
    if k is Kind.UNION:
        if nullable(x.x):
            _, pa = eps_proof(x.x)
            return BLANK, _step(R.EpsilonUnionPos1, (pa,), Eq(eps(x), BLANK))
        if nullable(x.y):
            _, pb = eps_proof(x.y)
            return BLANK, _step(R.EpsilonUnionPos2, (pb,), Eq(eps(x), BLANK))
        _, pa = eps_proof(x.x)
        _, pb = eps_proof(x.y)
        return EMPTY, _step(R.EpsilonUnionNeg, (pa, pb), Eq(eps(x), EMPTY))
    if k is Kind.CONCAT:
        if not nullable(x.x):
            _, pa = eps_proof(x.x)
            return EMPTY, _step(R.EpsilonConcatNeg1, (pa,), Eq(eps(x), EMPTY))
        if not nullable(x.y):
            _, pb = eps_proof(x.y)
            return EMPTY, _step(R.EpsilonConcatNeg2, (pb,), Eq(eps(x), EMPTY))
        _, pa = eps_proof(x.x)
        _, pb = eps_proof(x.y)
        return BLANK, _step(R.EpsilonConcatPos, (pa, pb), Eq(eps(x), BLANK))
    raise ValueError("eps_proof expects a regular expression")


def deriv_proof(c: int, x: Term):
    """``(r, pf)`` with ``r = derive_char(c, x)`` and ``pf : δc x = r``."""
    k = x.kind
    lhs = der(c, x)
    if k is Kind.EMPTY:
        return EMPTY, _step(R.DeriveEmpty, (), Eq(lhs, EMPTY))
    if k is Kind.BLANK:
        return EMPTY, _step(R.DeriveBlank, (), Eq(lhs, EMPTY))
    if k is Kind.CHAR:
        if x.imm == c:
            return BLANK, _step(R.DeriveCharSame, (), Eq(lhs, BLANK))
        return EMPTY, _step(R.DeriveCharDifferent, (), Eq(lhs, EMPTY))
    if k is Kind.UNION:
        a, b = x.x, x.y
        top = _step(R.DeriveUnion, (), Eq(lhs, alt(der(c, a), der(c, b))))
        ra, pa = deriv_proof(c, a)
        rb, pb = deriv_proof(c, b)
        return alt(ra, rb), trans(top, cong2(Kind.UNION, der(c, a), pa, der(c, b), pb))
    if k is Kind.CONCAT:
        a, b = x.x, x.y
        left, right = cat(der(c, a), b), cat(eps(a), der(c, b))
        top = _step(R.DeriveConcat, (), Eq(lhs, alt(left, right)))
        ra, pa = deriv_proof(c, a)
        ea, pe = eps_proof(a)
        rb, pb = deriv_proof(c, b)
        pl = cong2(Kind.CONCAT, der(c, a), pa, b, None)
        pr = cong2(Kind.CONCAT, eps(a), pe, der(c, b), pb)
        return (alt(cat(ra, b), cat(ea, rb)),
                trans(top, cong2(Kind.UNION, left, pl, right, pr)))
    if k is Kind.STAR:
        a = x.x
        top = _step(R.DeriveStar, (), Eq(lhs, cat(der(c, a), x)))
        ra, pa = deriv_proof(c, a)
        return cat(ra, x), trans(top, cong2(Kind.CONCAT, der(c, a), pa, x, None))
    raise ValueError("deriv_proof expects a regular expression")


def reduce_proof(t: Term):
    """``(r, pf)`` with ``r`` free of E/δ nodes, unfolding innermost first."""
    if t.regex:
        return t, None
    k = t.kind
    if k is Kind.EPS:
        x, px = reduce_proof(t.x)
        v, pv = eps_proof(x)
        return v, trans(cong1(Kind.EPS, 0, px), pv)
    if k is Kind.DERIV:
        x, px = reduce_proof(t.x)
        r, pr = deriv_proof(t.imm, x)
        return r, trans(cong1(Kind.DERIV, t.imm, px), pr)
    if k is Kind.STAR:
        x, px = reduce_proof(t.x)
        return Term(k, 0, x), cong1(k, 0, px)
    x, px = reduce_proof(t.x)
    y, py = reduce_proof(t.y)
    return Term(k, 0, x, y), cong2(k, t.x, px, t.y, py)


# --------------------------------------------------------- normalization

def _merge_cat(x: Term, y: Term):
    """Normal form of ``xy`` for normal ``x, y``, with proof ``xy = r``."""
    xy = cat(x, y)
    if x is EMPTY:
        return EMPTY, _step(R.ConcatEmptyL, (), Eq(xy, EMPTY))
    if y is EMPTY:
        return EMPTY, _step(R.ConcatEmptyR, (), Eq(xy, EMPTY))
    if x is BLANK:
        return y, _step(R.ConcatBlankL, (), Eq(xy, y))
    if y is BLANK:
        return x, _step(R.ConcatBlankR, (), Eq(xy, x))
    if x.kind is not Kind.CONCAT:
        return xy, None
    x1, x2 = x.x, x.y
    re = cat(x1, cat(x2, y))
    assoc = symm(_step(R.ConcatAssoc, (), Eq(re, xy)))
    r2, p2 = _merge_cat(x2, y)
    return cat(x1, r2), trans(assoc, cong2(Kind.CONCAT, x1, None, cat(x2, y), p2))


def _insert(a: Term, m: Term):
    """Insert the single member ``a`` into the normal union ``m``."""
    am = alt(a, m)
    if m.kind is not Kind.UNION:
        r = term_compare(a, m)
        if r == 0:
            return a, _step(R.UnionSelf, (), Eq(am, a))
        if r < 0:
            return am, None
        return alt(m, a), _step(R.UnionComm, (), Eq(am, alt(m, a)))
    h, rest = m.x, m.y
    r = term_compare(a, h)
    if r < 0:
        return am, None
    assoc = _step(R.UnionAssoc, (), Eq(am, alt(alt(a, h), rest)))
    if r == 0:
        self_ = _step(R.UnionSelf, (), Eq(alt(a, a), a))
        return m, trans(assoc, cong2(Kind.UNION, alt(a, a), self_, rest, None))
    comm = _step(R.UnionComm, (), Eq(alt(a, h), alt(h, a)))
    back = symm(_step(R.UnionAssoc, (), Eq(alt(h, alt(a, rest)), alt(alt(h, a), rest))))
    r2, p2 = _insert(a, rest)
    return alt(h, r2), trans(assoc, cong2(Kind.UNION, alt(a, h), comm, rest, None),
                             back, cong2(Kind.UNION, h, None, alt(a, rest), p2))


def _merge_union(x: Term, y: Term):
    """Normal form of ``x|y`` for normal ``x, y``, with proof."""
    xy = alt(x, y)
    if y is EMPTY:
        return x, _step(R.UnionEmpty, (), Eq(xy, x))
    if x is EMPTY:
        comm = _step(R.UnionComm, (), Eq(xy, alt(y, x)))
        return y, trans(comm, _step(R.UnionEmpty, (), Eq(alt(y, x), y)))
    if x.kind is not Kind.UNION:
        return _insert(x, y)
    x1, xs = x.x, x.y
    re = alt(x1, alt(xs, y))
    assoc = symm(_step(R.UnionAssoc, (), Eq(re, xy)))
    r2, p2 = _merge_union(xs, y)
    r3, p3 = _insert(x1, r2)
    return r3, trans(assoc, cong2(Kind.UNION, x1, None, alt(xs, y), p2), p3)


def normalize_proof(t: Term):
    """``(normalize(t), pf)`` with ``pf : t = normalize(t)`` or ``None``."""
    if normalize(t) is t:
        return t, None
    k = t.kind
    if k is Kind.STAR:
        x, px = normalize_proof(t.x)
        return star_of(x), cong1(Kind.STAR, 0, px)
    x, px = normalize_proof(t.x)
    y, py = normalize_proof(t.y)
    head = cong2(k, t.x, px, t.y, py)
    if k is Kind.CONCAT:
        r, pr = _merge_cat(x, y)
    else:
        r, pr = _merge_union(x, y)
    return r, trans(head, pr)


def star_of(x: Term) -> Term:
    return Term(Kind.STAR, 0, x)


# ------------------------------------------------------- proof generation

def proof_gen(p: Term, q: Term, n: int, budget: int = DEFAULT_BUDGET,
              trace: Optional[list] = None) -> ProofStep:
    """Proof of ``p = q`` for regular expressions with equal languages.

    Follows the derivative search of :func:`equiv`, emitting Match chains
    when every child closes by equality and Coinduction chains otherwise.
    Raises :class:`NotEquivalent` at the first epsilon disagreement and
    :class:`BudgetExceeded` after ``budget`` calls.
    """
    P0, pp = normalize_proof(p)
    Q0, pq = normalize_proof(q)
    calls = 0
    path: dict = {}
    s: list = []
    DP = [P0]
    DQ = [Q0]
    PE = [None]
    QE = [None]

    def eps_agree(a, b):
        # E(a) = E(b) for normal a, b with equal nullability
        _, pa = eps_proof(a)
        _, pb = eps_proof(b)
        return trans(pa, symm(pb))

    def go(m, pn, qn):
        nonlocal calls
        calls += 1
        if calls > budget:
            raise BudgetExceeded(f"more than {budget} recursive calls")
        if pn is qn:
            trace is not None and trace.append("equal")
            return ("eq", None)
        hit = path.get((pn, qn))
        if hit is not None:
            trace is not None and trace.append("cycle")
            d0 = hit
            tail = tuple(s[d0:m])
            prem_p = trans(PE[m], symm(PE[d0]))
            prem_q = trans(QE[m], symm(QE[d0]))
            return ("sync", d0, _step(R.SyncCycle, (prem_p, prem_q),
                                      Sync(tail, DP[d0], DQ[d0])))
        if nullable(pn) != nullable(qn):
            trace is not None and trace.append("mismatch")
            raise NotEquivalent("the two expressions disagree on some string")
        trace is not None and trace.append("expand")

        path[(pn, qn)] = m
        kids = []
        for c in range(n):
            rp, prp = deriv_proof(c, pn)
            rq, prq = deriv_proof(c, qn)
            pc, npc = normalize_proof(rp)
            qc, nqc = normalize_proof(rq)
            step_p = trans(prp, npc)
            step_q = trans(prq, nqc)
            s.append(c)
            DP.append(der(c, DP[m]))
            DQ.append(der(c, DQ[m]))
            PE.append(trans(cong1(Kind.DERIV, c, PE[m]), step_p))
            QE.append(trans(cong1(Kind.DERIV, c, QE[m]), step_q))
            try:
                res = go(m + 1, pc, qc)
                kids.append((res, step_p, step_q, PE[m + 1], QE[m + 1]))
            finally:
                s.pop()
                DP.pop()
                DQ.pop()
                PE.pop()
                QE.pop()
        del path[(pn, qn)]

        if all(r[0][0] == "eq" for r in kids):
            acc = _step(R.AgreeInit, (eps_agree(pn, qn),), Agree(0, pn, qn))
            for c, (res, step_p, step_q, _, _) in enumerate(kids):
                dc = trans(step_p, res[1], symm(step_q))
                acc = _step(R.AgreeStep, (acc, dc), Agree(c + 1, pn, qn))
            return ("eq", _step(R.MatchFinish, (acc,), Eq(pn, qn)))

        d = min(r[0][1] for r in kids if r[0][0] == "sync")
        base_p, base_q = DP[d], DQ[d]
        here = tuple(s[d:m])
        ep = trans(cong1(Kind.EPS, 0, PE[m]), eps_agree(pn, qn),
                   symm(cong1(Kind.EPS, 0, QE[m])))
        acc = _step(R.SyncInit, (ep,), SyncUpTo(0, here, base_p, base_q))
        for c, (res, step_p, step_q, pe_c, qe_c) in enumerate(kids):
            if res[0] == "eq":
                # δ_{s·c} chains are equal, so they sync
                chain_eq = trans(pe_c, res[1], symm(qe_c))
                sc = _step(R.EqualSync, (chain_eq,),
                           Sync(here + (c,), base_p, base_q))
            else:
                sc = res[2]
                # fold the Sync down from the child's base depth to d
                for j in range(res[1] - 1, d - 1, -1):
                    sub = tuple(s[j:m]) + (c,)
                    sc = _step(R.SyncFold, (sc,), Sync(sub, DP[j], DQ[j]))
            acc = _step(R.SyncStep, (acc, sc), SyncUpTo(c + 1, here, base_p, base_q))
        sync = _step(R.CoinductFinish, (acc,), Sync(here, base_p, base_q))
        if d < m:
            return ("sync", d, sync)
        whole = _step(R.SyncEmpty, (sync,), Eq(base_p, base_q))
        return ("eq", trans(symm(PE[m]), whole, QE[m]))

    res = go(0, P0, Q0)
    core = res[1] if res[1] is not None else refl(P0)
    return subst(core, symm(pp), symm(pq))


# -------------------------------------------------------- post-processing

def bookend(eq_proof: ProofStep) -> ProofStep:
    """Wrap a proof of ``p = q`` into a refutation of ``p ≠ q``."""
    f = eq_proof.conclusion
    if f.kind is not FormulaKind.EQ:
        raise ValueError("bookend expects an equality proof")
    assume = _step(R.Assume, (), Neq(f.p, f.q))
    return _step(R.Contra, (assume, eq_proof), BOTTOM)


def _dedup_once(root: ProofStep) -> ProofStep:
    order = list(walk(root))
    size = {}
    best = {}
    for st in order:
        sz = 1 + sum(size[id(p)] for p in st.premises)
        size[id(st)] = sz
        cur = best.get(st.conclusion)
        if cur is None or sz < size[id(cur)]:
            best[st.conclusion] = st
    built = {}
    stack = [root.conclusion]
    while stack:
        f = stack[-1]
        if f in built:
            stack.pop()
            continue
        rep = best[f]
        missing = [p.conclusion for p in rep.premises if p.conclusion not in built]
        if missing:
            stack.extend(missing)
            continue
        stack.pop()
        prems = tuple(built[p.conclusion] for p in rep.premises)
        if prems == rep.premises:
            built[f] = rep
        else:
            built[f] = ProofStep(rep.rule, prems, f)
    return built[root.conclusion]


def dedup_and_prune(root: ProofStep) -> ProofStep:
    """Share one smallest derivation per conclusion and drop unreachable steps.

    Ties between equally small derivations go to the first one met in a
    post-order walk from the root.
    """
    count = sum(1 for _ in walk(root))
    while True:
        root = _dedup_once(root)
        new = sum(1 for _ in walk(root))
        if new >= count:
            return root
        count = new


def prove(p: Term, q: Term, n: int, budget: int = DEFAULT_BUDGET) -> ProofStep:
    """Generate, deduplicate and bookend a proof that ``p = q``."""
    return bookend(dedup_and_prune(proof_gen(p, q, n, budget)))
