"""Rule set, formulas, proof steps and a tree-level reference checker.

Match and Coinduction naturally take ``n + 1`` premises.  Here they are
split into two-premise chains using accumulator formulas:

* ``AGREE(k, p, q)``: ``E(p) = E(q)`` and ``δc p = δc q`` for the first
  ``k`` alphabet characters.
* ``SYNCUPTO(k, s, p, q)``: ``E(δs p) = E(δs q)`` and ``Sync(s·c, p, q)``
  for the first ``k`` characters.

A chain runs Init, then Step for ``k = 0 .. n-1``, then Finish at ``k = n``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .terms import (BLANK, EMPTY, Kind, Term, alt, cat, der, der_chain, eps,
                    to_text)


class RuleId(enum.IntEnum):
    # coinduction
    MatchFinish = 0
    CoinductFinish = 1
    SyncCycle = 2
    SyncFold = 3
    EqualSync = 4
    SyncEmpty = 5
    AgreeInit = 6
    AgreeStep = 7
    SyncInit = 8
    SyncStep = 9
    # normalization axioms
    UnionAssoc = 10
    UnionComm = 11
    UnionEmpty = 12
    UnionSelf = 13
    ConcatAssoc = 14
    ConcatBlankL = 15
    ConcatBlankR = 16
    ConcatEmptyL = 17
    ConcatEmptyR = 18
    # equality
    Refl = 19
    Symm = 20
    Trans = 21
    PredCongL = 22
    PredCongR = 23
    FunCong1 = 24
    FunCong2 = 25
    # epsilon unfolding
    EpsilonEmpty = 26
    EpsilonBlank = 27
    EpsilonChar = 28
    EpsilonUnionPos1 = 29
    EpsilonUnionPos2 = 30
    EpsilonUnionNeg = 31
    EpsilonConcatPos = 32
    EpsilonConcatNeg1 = 33
    EpsilonConcatNeg2 = 34
    EpsilonStar = 35
    # derivative unfolding
    DeriveEmpty = 36
    DeriveBlank = 37
    DeriveCharSame = 38
    DeriveCharDifferent = 39
    DeriveUnion = 40
    DeriveConcat = 41
    DeriveStar = 42
    # bookends
    Assume = 43
    Contra = 44


ARITY = {r: 0 for r in RuleId}
ARITY.update({
    RuleId.MatchFinish: 1, RuleId.CoinductFinish: 1, RuleId.SyncCycle: 2,
    RuleId.SyncFold: 1, RuleId.EqualSync: 1, RuleId.SyncEmpty: 1,
    RuleId.AgreeInit: 1, RuleId.AgreeStep: 2, RuleId.SyncInit: 1,
    RuleId.SyncStep: 2, RuleId.Symm: 1, RuleId.Trans: 2,
    RuleId.PredCongL: 2, RuleId.PredCongR: 2, RuleId.FunCong1: 1,
    RuleId.FunCong2: 2, RuleId.EpsilonUnionPos1: 1,
    RuleId.EpsilonUnionPos2: 1, RuleId.EpsilonUnionNeg: 2,
    RuleId.EpsilonConcatPos: 2, RuleId.EpsilonConcatNeg1: 1,
    RuleId.EpsilonConcatNeg2: 1, RuleId.Contra: 2,
})

# Rules whose checks walk a whole string or derivative chain.
LINEAR_RULES = frozenset({RuleId.SyncCycle, RuleId.EqualSync,
                          RuleId.SyncInit, RuleId.SyncStep})


class FormulaKind(enum.IntEnum):
    EQ = 0
    SYNC = 1
    NEQ = 2
    BOTTOM = 3
    AGREE = 4
    SYNCUPTO = 5


class Formula:
    """Interned formula ``kind(k, s, p, q)``; unused fields are 0/()/None."""

    __slots__ = ("kind", "k", "s", "p", "q")
    _table: dict = {}

    def __new__(cls, kind, k=0, s=(), p=None, q=None):
        key = (kind, k, s, p, q)
        f = cls._table.get(key)
        if f is None:
            f = object.__new__(cls)
            object.__setattr__(f, "kind", FormulaKind(kind))
            object.__setattr__(f, "k", k)
            object.__setattr__(f, "s", tuple(s))
            object.__setattr__(f, "p", p)
            object.__setattr__(f, "q", q)
            f = cls._table.setdefault(key, f)
        return f

    def __setattr__(self, name, value):
        raise AttributeError("Formula is immutable")

    def __reduce__(self):
        return (Formula, (self.kind, self.k, self.s, self.p, self.q))

    def __repr__(self):
        return f"Formula({format_formula(self)})"


def Eq(p: Term, q: Term) -> Formula:
    return Formula(FormulaKind.EQ, 0, (), p, q)


def Neq(p: Term, q: Term) -> Formula:
    return Formula(FormulaKind.NEQ, 0, (), p, q)


def Sync(s, p: Term, q: Term) -> Formula:
    return Formula(FormulaKind.SYNC, 0, tuple(s), p, q)


def Agree(k: int, p: Term, q: Term) -> Formula:
    return Formula(FormulaKind.AGREE, k, (), p, q)


def SyncUpTo(k: int, s, p: Term, q: Term) -> Formula:
    return Formula(FormulaKind.SYNCUPTO, k, tuple(s), p, q)


BOTTOM = Formula(FormulaKind.BOTTOM)


def format_formula(f: Formula, alphabet=None) -> str:
    def t(x):
        return to_text(x, alphabet)

    def st(s):
        if not s:
            return "ε"
        if alphabet is None:
            return "".join(chr(ord("a") + c) for c in s)
        return "".join(alphabet[c] for c in s)

    k = f.kind
    if k is FormulaKind.EQ:
        return f"{t(f.p)} = {t(f.q)}"
    if k is FormulaKind.NEQ:
        return f"{t(f.p)} ≠ {t(f.q)}"
    if k is FormulaKind.BOTTOM:
        return "⊥"
    if k is FormulaKind.SYNC:
        return f"Sync({st(f.s)}, {t(f.p)}, {t(f.q)})"
    if k is FormulaKind.AGREE:
        return f"AgreeUpTo({f.k}, {t(f.p)}, {t(f.q)})"
    return f"SyncUpTo({f.k}, {st(f.s)}, {t(f.p)}, {t(f.q)})"


class ProofStep:
    """One rule application.  Steps compare and hash by identity."""

    __slots__ = ("rule", "premises", "conclusion")

    def __init__(self, rule: RuleId, premises, conclusion: Formula):
        self.rule = RuleId(rule)
        self.premises = tuple(premises)
        self.conclusion = conclusion

    def __repr__(self):
        return f"<{self.rule.name}: {format_formula(self.conclusion)}>"


def walk(root: ProofStep) -> Iterator[ProofStep]:
    """Distinct reachable steps in post-order (premises before users)."""
    seen = set()
    stack = [(root, False)]
    while stack:
        st, expanded = stack.pop()
        if expanded:
            yield st
            continue
        if id(st) in seen:
            continue
        seen.add(id(st))
        stack.append((st, True))
        for p in reversed(st.premises):
            if id(p) not in seen:
                stack.append((p, False))


def step_count(root: ProofStep) -> int:
    return sum(1 for _ in walk(root))


# ----------------------------------------------------------- semantics

def _is(t: Optional[Term], kind: Kind) -> bool:
    return t is not None and t.kind is kind


def _eq(f: Formula) -> bool:
    return f.kind is FormulaKind.EQ


def unwind_chain(t: Term, s) -> Optional[Term]:
    """If ``t`` is ``δs(base)`` stored innermost-first, return ``base``."""
    for c in reversed(s):
        if t.kind is not Kind.DERIV or t.imm != c:
            return None
        t = t.x
    return t


def _check_axiom(rule: RuleId, f0: Formula) -> bool:
    if not _eq(f0):
        return False
    lhs, rhs = f0.p, f0.q
    if rule is RuleId.Refl:
        return lhs is rhs
    if rule is RuleId.UnionAssoc:
        return (lhs.kind is Kind.UNION and _is(lhs.y, Kind.UNION)
                and rhs is alt(alt(lhs.x, lhs.y.x), lhs.y.y))
    if rule is RuleId.UnionComm:
        return lhs.kind is Kind.UNION and rhs is alt(lhs.y, lhs.x)
    if rule is RuleId.UnionEmpty:
        return lhs is alt(rhs, EMPTY)
    if rule is RuleId.UnionSelf:
        return lhs is alt(rhs, rhs)
    if rule is RuleId.ConcatAssoc:
        return (lhs.kind is Kind.CONCAT and _is(lhs.y, Kind.CONCAT)
                and rhs is cat(cat(lhs.x, lhs.y.x), lhs.y.y))
    if rule is RuleId.ConcatBlankL:
        return lhs is cat(BLANK, rhs)
    if rule is RuleId.ConcatBlankR:
        return lhs is cat(rhs, BLANK)
    if rule is RuleId.ConcatEmptyL:
        return rhs is EMPTY and lhs.kind is Kind.CONCAT and lhs.x is EMPTY
    if rule is RuleId.ConcatEmptyR:
        return rhs is EMPTY and lhs.kind is Kind.CONCAT and lhs.y is EMPTY
    if rule is RuleId.EpsilonEmpty:
        return lhs is eps(EMPTY) and rhs is EMPTY
    if rule is RuleId.EpsilonBlank:
        return lhs is eps(BLANK) and rhs is BLANK
    if rule is RuleId.EpsilonChar:
        return lhs.kind is Kind.EPS and lhs.x.kind is Kind.CHAR and rhs is EMPTY
    if rule is RuleId.EpsilonStar:
        return lhs.kind is Kind.EPS and lhs.x.kind is Kind.STAR and rhs is BLANK
    if lhs.kind is not Kind.DERIV:
        return False
    c, body = lhs.imm, lhs.x
    if rule is RuleId.DeriveEmpty:
        return body is EMPTY and rhs is EMPTY
    if rule is RuleId.DeriveBlank:
        return body is BLANK and rhs is EMPTY
    if rule is RuleId.DeriveCharSame:
        return body.kind is Kind.CHAR and body.imm == c and rhs is BLANK
    if rule is RuleId.DeriveCharDifferent:
        return body.kind is Kind.CHAR and body.imm != c and rhs is EMPTY
    if rule is RuleId.DeriveUnion:
        return body.kind is Kind.UNION and rhs is alt(der(c, body.x), der(c, body.y))
    if rule is RuleId.DeriveConcat:
        return (body.kind is Kind.CONCAT
                and rhs is alt(cat(der(c, body.x), body.y),
                               cat(eps(body.x), der(c, body.y))))
    if rule is RuleId.DeriveStar:
        return body.kind is Kind.STAR and rhs is cat(der(c, body.x), body)
    return False


def check_formulas(rule: RuleId, f0: Formula, prem: list, n: int) -> bool:
    """Does ``prem ⊢ f0`` instantiate ``rule``?  ``n`` is the alphabet size."""
    rule = RuleId(rule)
    if len(prem) != ARITY[rule]:
        return False
    K = FormulaKind
    if not prem:
        if rule is RuleId.Assume:
            return f0.kind is K.NEQ
        return _check_axiom(rule, f0)
    f1 = prem[0]
    f2 = prem[1] if len(prem) > 1 else None

    if rule is RuleId.Symm:
        return _eq(f0) and _eq(f1) and f0.p is f1.q and f0.q is f1.p
    if rule is RuleId.Trans:
        return (_eq(f0) and _eq(f1) and _eq(f2) and f1.p is f0.p
                and f1.q is f2.p and f2.q is f0.q)
    if rule in (RuleId.PredCongL, RuleId.PredCongR):
        if f0.kind is K.BOTTOM or f1.kind is not f0.kind or not _eq(f2):
            return False
        if f0.k != f1.k or f0.s != f1.s:
            return False
        if rule is RuleId.PredCongL:
            return f1.p is f2.p and f0.p is f2.q and f0.q is f1.q
        return f1.q is f2.p and f0.q is f2.q and f0.p is f1.p
    if rule is RuleId.FunCong1:
        u, v = f0.p, f0.q
        return (_eq(f0) and _eq(f1) and u.kind in (Kind.STAR, Kind.EPS, Kind.DERIV)
                and v.kind is u.kind and v.imm == u.imm
                and u.x is f1.p and v.x is f1.q)
    if rule is RuleId.FunCong2:
        u, v = f0.p, f0.q
        return (_eq(f0) and _eq(f1) and _eq(f2)
                and u.kind in (Kind.CONCAT, Kind.UNION) and v.kind is u.kind
                and u.x is f1.p and v.x is f1.q and u.y is f2.p and v.y is f2.q)

    if rule in (RuleId.EpsilonUnionPos1, RuleId.EpsilonUnionPos2,
                RuleId.EpsilonUnionNeg, RuleId.EpsilonConcatPos,
                RuleId.EpsilonConcatNeg1, RuleId.EpsilonConcatNeg2):
        if not (_eq(f0) and f0.p.kind is Kind.EPS and _eq(f1)):
            return False
        body = f0.p.x
        want = Kind.UNION if rule in (RuleId.EpsilonUnionPos1, RuleId.EpsilonUnionPos2,
                                      RuleId.EpsilonUnionNeg) else Kind.CONCAT
        if body.kind is not want:
            return False
        if rule is RuleId.EpsilonUnionPos1:
            return f0.q is BLANK and f1.p is eps(body.x) and f1.q is BLANK
        if rule is RuleId.EpsilonUnionPos2:
            return f0.q is BLANK and f1.p is eps(body.y) and f1.q is BLANK
        if rule is RuleId.EpsilonConcatNeg1:
            return f0.q is EMPTY and f1.p is eps(body.x) and f1.q is EMPTY
        if rule is RuleId.EpsilonConcatNeg2:
            return f0.q is EMPTY and f1.p is eps(body.y) and f1.q is EMPTY
        val = EMPTY if rule is RuleId.EpsilonUnionNeg else BLANK
        return (_eq(f2) and f0.q is val and f1.p is eps(body.x) and f1.q is val
                and f2.p is eps(body.y) and f2.q is val)

    if rule is RuleId.Contra:
        return (f0.kind is K.BOTTOM and f1.kind is K.NEQ and _eq(f2)
                and f1.p is f2.p and f1.q is f2.q)
    if rule is RuleId.SyncEmpty:
        return (_eq(f0) and f1.kind is K.SYNC and f1.s == ()
                and f1.p is f0.p and f1.q is f0.q)
    if rule is RuleId.EqualSync:
        return (f0.kind is K.SYNC and _eq(f1)
                and unwind_chain(f1.p, f0.s) is f0.p
                and unwind_chain(f1.q, f0.s) is f0.q)
    if rule is RuleId.SyncCycle:
        return (f0.kind is K.SYNC and len(f0.s) > 0 and _eq(f1) and _eq(f2)
                and unwind_chain(f1.p, f0.s) is f0.p and f1.q is f0.p
                and unwind_chain(f2.p, f0.s) is f0.q and f2.q is f0.q)
    if rule is RuleId.SyncFold:
        if f0.kind is not K.SYNC or f1.kind is not K.SYNC or not f0.s:
            return False
        c = f0.s[0]
        return (f1.s == f0.s[1:] and f1.p is der(c, f0.p)
                and f1.q is der(c, f0.q))
    if rule is RuleId.AgreeInit:
        return (f0.kind is K.AGREE and f0.k == 0 and _eq(f1)
                and f1.p is eps(f0.p) and f1.q is eps(f0.q))
    if rule is RuleId.AgreeStep:
        k = f1.k
        return (f0.kind is K.AGREE and f1.kind is K.AGREE and _eq(f2)
                and 0 <= k < n and f0.k == k + 1
                and f1.p is f0.p and f1.q is f0.q
                and f2.p is der(k, f0.p) and f2.q is der(k, f0.q))
    if rule is RuleId.MatchFinish:
        return (_eq(f0) and f1.kind is K.AGREE and f1.k == n
                and f1.p is f0.p and f1.q is f0.q)
    if rule is RuleId.SyncInit:
        return (f0.kind is K.SYNCUPTO and f0.k == 0 and _eq(f1)
                and f1.p is eps(der_chain(f0.s, f0.p))
                and f1.q is eps(der_chain(f0.s, f0.q)))
    if rule is RuleId.SyncStep:
        k = f1.k
        return (f0.kind is K.SYNCUPTO and f1.kind is K.SYNCUPTO
                and f2.kind is K.SYNC and 0 <= k < n and f0.k == k + 1
                and f1.s == f0.s and f1.p is f0.p and f1.q is f0.q
                and f2.s == f0.s + (k,) and f2.p is f0.p and f2.q is f0.q)
    if rule is RuleId.CoinductFinish:
        return (f0.kind is K.SYNC and f1.kind is K.SYNCUPTO and f1.k == n
                and f1.s == f0.s and f1.p is f0.p and f1.q is f0.q)
    return False


def _chars_ok(f: Formula, n: int) -> bool:
    if any(c < 0 or c >= n for c in f.s):
        return False
    for t in (f.p, f.q):
        if t is None:
            continue
        stack = [t]
        while stack:
            x = stack.pop()
            if x.kind in (Kind.CHAR, Kind.DERIV) and not 0 <= x.imm < n:
                return False
            stack.extend(x.children)
    return True


def check_step_semantic(step: ProofStep, n: int) -> bool:
    """Does ``step`` instantiate its declared rule over an ``n``-letter alphabet?"""
    return check_formulas(step.rule, step.conclusion,
                          [p.conclusion for p in step.premises], n)


def check_step_any(step: ProofStep, n: int, rules=None) -> bool:
    """True if some rule (optionally from ``rules``) justifies the step.

    Extra trailing premises are ignored, as the table validator fetches two
    premises for every step.  Assume only justifies premise-less steps.
    """
    prem = [p.conclusion for p in step.premises]
    for r in (rules if rules is not None else RuleId):
        if r is RuleId.Assume and prem:
            continue
        a = ARITY[r]
        if a <= len(prem) and check_formulas(r, step.conclusion, prem[:a], n):
            return True
    return False


@dataclass
class TreeVerdict:
    ok: bool
    reason: str = ""
    failing: Optional[ProofStep] = None
    assumption: Optional[Formula] = None
    steps: int = 0
    detail: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_proof_tree(root: ProofStep, n: int, any_rule: bool = False) -> TreeVerdict:
    """Reference checker over the step graph reachable from ``root``.

    Accepts iff every step is an instance of its rule (or of any rule when
    ``any_rule`` is set), the graph is acyclic, at most two premises occur
    anywhere, exactly one Assume is reachable, and the root is a Contra
    concluding ⊥ whose inequality premise is the Assume's conclusion.
    """
    # cycle detection by iterative DFS with colors
    color = {}
    order = []
    stack = [(root, 0)]
    while stack:
        st, i = stack.pop()
        if i == 0:
            c = color.get(id(st))
            if c == 2:
                continue
            if c == 1:
                return TreeVerdict(False, "cyclic premise graph", st)
            color[id(st)] = 1
            if len(st.premises) > 2:
                return TreeVerdict(False, "more than two premises", st)
        if i < len(st.premises):
            stack.append((st, i + 1))
            nxt = st.premises[i]
            if color.get(id(nxt)) == 1:
                return TreeVerdict(False, "cyclic premise graph", nxt)
            if color.get(id(nxt)) != 2:
                stack.append((nxt, 0))
        else:
            color[id(st)] = 2
            order.append(st)

    assumes = []
    for st in order:
        if not _chars_ok(st.conclusion, n):
            return TreeVerdict(False, "character outside the alphabet", st)
        ok = check_step_any(st, n) if any_rule else check_step_semantic(st, n)
        if not ok:
            return TreeVerdict(False, f"step does not instantiate {st.rule.name}", st)
        # lifted graphs carry untrusted rule tags: recognise the hypothesis by shape
        if (any_rule and not st.premises and st.conclusion.kind is FormulaKind.NEQ) or (
                not any_rule and st.rule is RuleId.Assume):
            assumes.append(st)
    if len(assumes) != 1:
        return TreeVerdict(False, f"expected one Assume, found {len(assumes)}")
    if root.conclusion is not BOTTOM or (not any_rule and root.rule is not RuleId.Contra):
        return TreeVerdict(False, "root does not conclude ⊥ by Contra", root)
    if not any_rule and root.premises[0].conclusion is not assumes[0].conclusion:
        return TreeVerdict(False, "Contra does not use the assumption", root)
    return TreeVerdict(True, "", None, assumes[0].conclusion, len(order))
