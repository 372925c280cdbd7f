"""Table-driven proof validator.

Each rule has a checking instruction written in a tiny statement language
over the three formula rows of a step (``f0`` is the conclusion, ``f1`` and
``f2`` the premises).  Statements only fetch rows and compare indices or
small constants; whole terms are never compared.  The same instruction text
is compiled two ways: to straight-line Python for the fast plaintext engine,
and to an interpreter that runs every operation through a commitment
backend so the operation transcript can be audited.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from typing import Optional

from .calculus import FormulaKind, RuleId
from .mux import DEFAULT, FULL, NONE, MuxConfig
from .tables import ProofTables, index_problem, recategorize
from .terms import ARITY as TERM_ARITY
from .terms import Kind
from .zksim import PlainBackend, ZkBackend

__all__ = ["MuxConfig", "DEFAULT", "FULL", "NONE", "INSTRUCTIONS", "validate",
           "checking_instr", "check_reverse", "sync_extend_scan", "permute_check",
           "consistency_check", "ValidationReport"]

R = RuleId

# ----------------------------------------------------------- instructions

INSTRUCTIONS = {
    R.Refl: "f0.kind == EQ; f0.a == f0.b",
    R.Symm: "f0.kind == EQ; f1.kind == EQ; f0.a == f1.b; f0.b == f1.a",
    R.Trans: """f0.kind == EQ; f1.kind == EQ; f2.kind == EQ
                f1.a == f0.a; f1.b == f2.a; f2.b == f0.b""",
    R.PredCongL: """f0.kind in {EQ, SYNC, NEQ, AGREE, SYNCUPTO}; f1.kind == f0.kind
                    f2.kind == EQ; f1.k == f0.k; f1.s == f0.s
                    f1.a == f2.a; f0.a == f2.b; f0.b == f1.b""",
    R.PredCongR: """f0.kind in {EQ, SYNC, NEQ, AGREE, SYNCUPTO}; f1.kind == f0.kind
                    f2.kind == EQ; f1.k == f0.k; f1.s == f0.s
                    f1.b == f2.a; f0.b == f2.b; f0.a == f1.a""",
    R.FunCong1: """f0.kind == EQ; f1.kind == EQ; U = T[f0.a]; V = T[f0.b]
                   U.kind in {Star, Eps, Deriv}; V.kind == U.kind; V.imm == U.imm
                   U.x == f1.a; V.x == f1.b""",
    R.FunCong2: """f0.kind == EQ; f1.kind == EQ; f2.kind == EQ; U = T[f0.a]; V = T[f0.b]
                   U.kind in {Concat, Union}; V.kind == U.kind
                   U.x == f1.a; V.x == f1.b; U.y == f2.a; V.y == f2.b""",
    # normalization axioms
    R.UnionAssoc: """f0.kind == EQ; L = T[f0.a]; M = T[L.y]; Q = T[f0.b]; N = T[Q.x]
                     L.kind == Union; M.kind == Union; Q.kind == Union; N.kind == Union
                     N.x == L.x; N.y == M.x; Q.y == M.y""",
    R.UnionComm: """f0.kind == EQ; L = T[f0.a]; Q = T[f0.b]
                    L.kind == Union; Q.kind == Union; L.x == Q.y; L.y == Q.x""",
    R.UnionEmpty: """f0.kind == EQ; L = T[f0.a]; Y = T[L.y]
                     L.kind == Union; Y.kind == Empty; L.x == f0.b""",
    R.UnionSelf: """f0.kind == EQ; L = T[f0.a]
                    L.kind == Union; L.x == f0.b; L.y == f0.b""",
    R.ConcatAssoc: """f0.kind == EQ; L = T[f0.a]; M = T[L.y]; Q = T[f0.b]; N = T[Q.x]
                      L.kind == Concat; M.kind == Concat; Q.kind == Concat; N.kind == Concat
                      N.x == L.x; N.y == M.x; Q.y == M.y""",
    R.ConcatBlankL: """f0.kind == EQ; L = T[f0.a]; X = T[L.x]
                       L.kind == Concat; X.kind == Blank; L.y == f0.b""",
    R.ConcatBlankR: """f0.kind == EQ; L = T[f0.a]; Y = T[L.y]
                       L.kind == Concat; Y.kind == Blank; L.x == f0.b""",
    R.ConcatEmptyL: """f0.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                       L.kind == Concat; X.kind == Empty; Q.kind == Empty""",
    R.ConcatEmptyR: """f0.kind == EQ; L = T[f0.a]; Y = T[L.y]; Q = T[f0.b]
                       L.kind == Concat; Y.kind == Empty; Q.kind == Empty""",
    # epsilon unfolding
    R.EpsilonEmpty: """f0.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                       L.kind == Eps; X.kind == Empty; Q.kind == Empty""",
    R.EpsilonBlank: """f0.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                       L.kind == Eps; X.kind == Blank; Q.kind == Blank""",
    R.EpsilonChar: """f0.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                      L.kind == Eps; X.kind == Char; Q.kind == Empty""",
    R.EpsilonStar: """f0.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                      L.kind == Eps; X.kind == Star; Q.kind == Blank""",
    R.EpsilonUnionPos1: """f0.kind == EQ; f1.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                           A = T[f1.a]; B = T[f1.b]
                           L.kind == Eps; X.kind == Union; Q.kind == Blank
                           A.kind == Eps; A.x == X.x; B.kind == Blank""",
    R.EpsilonUnionPos2: """f0.kind == EQ; f1.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                           A = T[f1.a]; B = T[f1.b]
                           L.kind == Eps; X.kind == Union; Q.kind == Blank
                           A.kind == Eps; A.x == X.y; B.kind == Blank""",
    R.EpsilonUnionNeg: """f0.kind == EQ; f1.kind == EQ; f2.kind == EQ
                          L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                          A = T[f1.a]; B = T[f1.b]; C = T[f2.a]; D = T[f2.b]
                          L.kind == Eps; X.kind == Union; Q.kind == Empty
                          A.kind == Eps; A.x == X.x; B.kind == Empty
                          C.kind == Eps; C.x == X.y; D.kind == Empty""",
    R.EpsilonConcatPos: """f0.kind == EQ; f1.kind == EQ; f2.kind == EQ
                           L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                           A = T[f1.a]; B = T[f1.b]; C = T[f2.a]; D = T[f2.b]
                           L.kind == Eps; X.kind == Concat; Q.kind == Blank
                           A.kind == Eps; A.x == X.x; B.kind == Blank
                           C.kind == Eps; C.x == X.y; D.kind == Blank""",
    R.EpsilonConcatNeg1: """f0.kind == EQ; f1.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                            A = T[f1.a]; B = T[f1.b]
                            L.kind == Eps; X.kind == Concat; Q.kind == Empty
                            A.kind == Eps; A.x == X.x; B.kind == Empty""",
    R.EpsilonConcatNeg2: """f0.kind == EQ; f1.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                            A = T[f1.a]; B = T[f1.b]
                            L.kind == Eps; X.kind == Concat; Q.kind == Empty
                            A.kind == Eps; A.x == X.y; B.kind == Empty""",
    # derivative unfolding
    R.DeriveEmpty: """f0.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                      L.kind == Deriv; X.kind == Empty; Q.kind == Empty""",
    R.DeriveBlank: """f0.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                      L.kind == Deriv; X.kind == Blank; Q.kind == Empty""",
    R.DeriveCharSame: """f0.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                         L.kind == Deriv; X.kind == Char; X.imm == L.imm; Q.kind == Blank""",
    R.DeriveCharDifferent: """f0.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                              L.kind == Deriv; X.kind == Char; X.imm != L.imm
                              Q.kind == Empty""",
    R.DeriveUnion: """f0.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                      A = T[Q.x]; B = T[Q.y]
                      L.kind == Deriv; X.kind == Union; Q.kind == Union
                      A.kind == Deriv; A.imm == L.imm; A.x == X.x
                      B.kind == Deriv; B.imm == L.imm; B.x == X.y""",
    R.DeriveConcat: """f0.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]
                       C = T[Q.x]; D = T[Q.y]; A = T[C.x]; E = T[D.x]; B = T[D.y]
                       L.kind == Deriv; X.kind == Concat; Q.kind == Union
                       C.kind == Concat; D.kind == Concat
                       A.kind == Deriv; A.imm == L.imm; A.x == X.x; C.y == X.y
                       E.kind == Eps; E.x == X.x
                       B.kind == Deriv; B.imm == L.imm; B.x == X.y""",
    R.DeriveStar: """f0.kind == EQ; L = T[f0.a]; X = T[L.x]; Q = T[f0.b]; A = T[Q.x]
                     L.kind == Deriv; X.kind == Star; Q.kind == Concat
                     A.kind == Deriv; A.imm == L.imm; A.x == X.x; Q.y == L.x""",
    # bookends
    R.Assume: "f0.kind == NEQ",
    R.Contra: """f0.kind == BOTTOM; f1.kind == NEQ; f2.kind == EQ
                 f1.a == f2.a; f1.b == f2.b""",
    # coinduction
    R.SyncEmpty: """f0.kind == EQ; f1.kind == SYNC; H = S[f1.s]; H.height == 0
                    f1.a == f0.a; f1.b == f0.b""",
    R.EqualSync: """f0.kind == SYNC; f1.kind == EQ
                    rev(f1.a, f0.s, f0.a); rev(f1.b, f0.s, f0.b)""",
    R.SyncCycle: """f0.kind == SYNC; f1.kind == EQ; f2.kind == EQ; H = S[f0.s]
                    H.height != 0; f1.b == f0.a; f2.b == f0.b
                    rev(f1.a, f0.s, f0.a); rev(f2.a, f0.s, f0.b)""",
    R.SyncFold: """f0.kind == SYNC; f1.kind == SYNC; H = S[f0.s]; A = T[f1.a]; B = T[f1.b]
                   H.height != 0; H.tail == f1.s
                   A.kind == Deriv; A.imm == H.imm; A.x == f0.a
                   B.kind == Deriv; B.imm == H.imm; B.x == f0.b""",
    R.AgreeInit: """f0.kind == AGREE; f0.k == 0; f1.kind == EQ; A = T[f1.a]; B = T[f1.b]
                    A.kind == Eps; A.x == f0.a; B.kind == Eps; B.x == f0.b""",
    R.AgreeStep: """f0.kind == AGREE; f1.kind == AGREE; f2.kind == EQ
                    f1.k < n; f0.k == f1.k + 1; f1.a == f0.a; f1.b == f0.b
                    A = T[f2.a]; B = T[f2.b]
                    A.kind == Deriv; A.imm == f1.k; A.x == f0.a
                    B.kind == Deriv; B.imm == f1.k; B.x == f0.b""",
    R.MatchFinish: """f0.kind == EQ; f1.kind == AGREE; f1.k == n
                      f1.a == f0.a; f1.b == f0.b""",
    R.SyncInit: """f0.kind == SYNCUPTO; f0.k == 0; f1.kind == EQ; A = T[f1.a]; B = T[f1.b]
                   A.kind == Eps; B.kind == Eps
                   rev(A.x, f0.s, f0.a); rev(B.x, f0.s, f0.b)""",
    R.SyncStep: """f0.kind == SYNCUPTO; f1.kind == SYNCUPTO; f2.kind == SYNC
                   f1.k < n; f0.k == f1.k + 1; f1.s == f0.s
                   f1.a == f0.a; f1.b == f0.b; f2.a == f0.a; f2.b == f0.b
                   ext(f2.s, f0.s, f1.k)""",
    R.CoinductFinish: """f0.kind == SYNC; f1.kind == SYNCUPTO; f1.k == n
                         f1.s == f0.s; f1.a == f0.a; f1.b == f0.b""",
}

_FORMULA_FIELDS = {"kind": 0, "k": 1, "s": 2, "a": 3, "b": 4}
_TERM_FIELDS = {"kind": 0, "imm": 1, "x": 2, "y": 3}
_STRING_FIELDS = {"imm": 0, "tail": 1, "height": 2}
_CONSTS = {k.name: int(k) for k in FormulaKind}
_CONSTS.update({k.name.capitalize(): int(k) for k in Kind})

_REF = r"(\w+)\.(\w+)"
_PATTERNS = [
    ("fetch", re.compile(r"^(\w+) = ([TS])\[" + _REF + r"\]$")),
    ("succ", re.compile(r"^" + _REF + r" == " + _REF + r" \+ 1$")),
    ("eqn", re.compile(r"^" + _REF + r" == n$")),
    ("ltn", re.compile(r"^" + _REF + r" < n$")),
    ("in", re.compile(r"^" + _REF + r" in \{([\w, ]+)\}$")),
    ("cmpf", re.compile(r"^" + _REF + r" (==|!=) " + _REF + r"$")),
    ("cmpc", re.compile(r"^" + _REF + r" (==|!=) (\w+)$")),
    ("call", re.compile(r"^(rev|ext)\(" + _REF + r", " + _REF + r", " + _REF + r"\)$")),
]


def _parse(text: str) -> list:
    """Compile instruction text into op tuples with numeric field offsets."""
    table_of = {"f0": "F", "f1": "F", "f2": "F"}
    ops = []

    def ref(reg, name):
        tab = table_of.get(reg)
        if tab is None:
            raise ValueError(f"register {reg} used before fetch")
        fields = {"F": _FORMULA_FIELDS, "T": _TERM_FIELDS, "S": _STRING_FIELDS}[tab]
        return reg, fields[name]

    def const(tok):
        return int(tok) if tok.isdigit() else _CONSTS[tok]

    for stmt in re.split(r"[;\n]", text):
        stmt = " ".join(stmt.split())
        if not stmt:
            continue
        for name, pat in _PATTERNS:
            m = pat.match(stmt)
            if m:
                break
        else:
            raise ValueError(f"cannot parse {stmt!r}")
        g = m.groups()
        if name == "fetch":
            ops.append(("fetch", g[0], g[1]) + ref(g[2], g[3]))
            table_of[g[0]] = g[1]
        elif name == "succ":
            ops.append(("succ",) + ref(g[0], g[1]) + ref(g[2], g[3]))
        elif name in ("eqn", "ltn"):
            ops.append((name,) + ref(g[0], g[1]))
        elif name == "in":
            ops.append(("in",) + ref(g[0], g[1])
                       + (tuple(const(c.strip()) for c in g[2].split(",")),))
        elif name == "cmpf":
            ops.append(("eqf" if g[2] == "==" else "nef",) + ref(g[0], g[1]) + ref(g[3], g[4]))
        elif name == "cmpc":
            ops.append(("eqc" if g[2] == "==" else "nec",) + ref(g[0], g[1]) + (const(g[3]),))
        else:
            ops.append((g[0],) + ref(g[1], g[2]) + ref(g[3], g[4]) + ref(g[5], g[6]))
    return ops


OPS = {rule: _parse(text) for rule, text in INSTRUCTIONS.items()}
assert set(OPS) == set(RuleId)

_DERIV = int(Kind.DERIV)


# --------------------------------------------------------- plaintext path

def _rev_plain(T, S, nu, chain, s, base):
    h = S[s][2]
    if h > nu:
        return False
    chars = []
    cur = s
    for _ in range(h):
        row = S[cur]
        chars.append(row[0])
        cur = row[1]
    if S[cur][2] != 0:
        return False
    t = chain
    for i in range(h - 1, -1, -1):
        row = T[t]
        if row[0] != _DERIV or row[1] != chars[i]:
            return False
        t = row[2]
    if base is None:
        return T[t][0] != _DERIV
    return t == base


def _ext_plain(S, nu, sc, s, c):
    h = S[s][2]
    if h > nu:
        return False
    a, b = sc, s
    for _ in range(h):
        ra, rb = S[a], S[b]
        if ra[0] != rb[0]:
            return False
        a, b = ra[1], rb[1]
    if S[b][2] != 0:
        return False
    ra = S[a]
    return ra[2] == 1 and ra[0] == c


def _codegen(rule: RuleId, ops: list):
    lines = [f"def check_{rule.name}(f0, f1, f2, T, S, n, nu):"]
    for op in ops:
        k = op[0]
        if k == "fetch":
            _, dst, tab, r, f = op
            lines.append(f"    {dst} = {tab}[{r}[{f}]]")
            continue
        if k == "eqf":
            cond = f"{op[1]}[{op[2]}] != {op[3]}[{op[4]}]"
        elif k == "nef":
            cond = f"{op[1]}[{op[2]}] == {op[3]}[{op[4]}]"
        elif k == "eqc":
            cond = f"{op[1]}[{op[2]}] != {op[3]}"
        elif k == "nec":
            cond = f"{op[1]}[{op[2]}] == {op[3]}"
        elif k == "in":
            cond = f"{op[1]}[{op[2]}] not in {set(op[3])!r}"
        elif k == "succ":
            cond = f"{op[1]}[{op[2]}] != {op[3]}[{op[4]}] + 1"
        elif k == "eqn":
            cond = f"{op[1]}[{op[2]}] != n"
        elif k == "ltn":
            cond = f"{op[1]}[{op[2]}] >= n"
        elif k == "rev":
            cond = (f"not _rev(T, S, nu, {op[1]}[{op[2]}], {op[3]}[{op[4]}], "
                    f"{op[5]}[{op[6]}])")
        elif k == "ext":
            cond = f"not _ext(S, nu, {op[1]}[{op[2]}], {op[3]}[{op[4]}], {op[5]}[{op[6]}])"
        else:
            raise AssertionError(k)
        lines.append(f"    if {cond}: return False")
    lines.append("    return True")
    ns = {"_rev": _rev_plain, "_ext": _ext_plain}
    exec("\n".join(lines), ns)
    return ns[f"check_{rule.name}"]


PLAIN = {rule: _codegen(rule, ops) for rule, ops in OPS.items()}


def checking_instr(rule: RuleId, f0: tuple, f1: tuple, f2: tuple, t: ProofTables) -> bool:
    """Run one rule's checking instruction on three formula rows."""
    return PLAIN[RuleId(rule)](f0, f1, f2, t.terms, t.strings, t.n, t.nu)


# -------------------------------------------------- backend-driven path

def _zk_rev(B, T, S, n, nu, chain, s, base):
    """Derivative chain vs. string reversal; always ``nu`` iterations."""
    h = B.fetch("Ms", S, s)[2]
    one = B.const(1)
    th, sh = chain, s
    A, Bs = [], []
    ok = one
    for k in range(1, nu + 1):
        B.loop_iter("rev")
        kk = B.const(k)
        z = B.not_(B.lt(h, kk))
        tr = B.fetch("Mt", T, th)
        sr = B.fetch("Ms", S, sh)
        is_der = B.eq(tr[0], B.const(_DERIV))
        ok = B.and_(ok, B.or_(is_der, B.not_(z)))
        A.append(B.mul(z, B.join(kk, tr[1])))
        Bs.append(B.mul(z, B.join(B.sub(B.add(h, one), kk), sr[0])))
        th = B.select(z, tr[2], th)
        sh = B.select(z, sr[1], sh)
    end = B.fetch("Ms", S, sh)
    ok = B.and_(ok, B.eq(end[2], B.const(0)))
    if base is not None:
        ok = B.and_(ok, B.eq(th, base))
    else:
        # no base given: the chain must stop exactly here
        rest = B.fetch("Mt", T, th)
        ok = B.and_(ok, B.not_(B.eq(rest[0], B.const(_DERIV))))
    return B.and_(ok, B.multiset_eq(A, Bs))


def _zk_ext(B, T, S, n, nu, sc, s, c):
    """``string(sc) == string(s) · c``; always ``nu`` iterations."""
    h = B.fetch("Ms", S, s)[2]
    a, b = sc, s
    ok = B.const(1)
    for k in range(1, nu + 1):
        B.loop_iter("ext")
        z = B.not_(B.lt(h, B.const(k)))
        ra = B.fetch("Ms", S, a)
        rb = B.fetch("Ms", S, b)
        ok = B.and_(ok, B.or_(B.eq(ra[0], rb[0]), B.not_(z)))
        a = B.select(z, ra[1], a)
        b = B.select(z, rb[1], b)
    rb = B.fetch("Ms", S, b)
    ra = B.fetch("Ms", S, a)
    ok = B.and_(ok, B.eq(rb[2], B.const(0)))
    ok = B.and_(ok, B.eq(ra[2], B.const(1)))
    return B.and_(ok, B.eq(ra[0], c))


def run_instr(B, ops, f0, f1, f2, T, S, n, nu):
    """Execute every op of an instruction through backend ``B``; no early exit."""
    regs = {"f0": f0, "f1": f1, "f2": f2}
    nn = B.const(n)
    ok = B.const(1)
    for op in ops:
        k = op[0]
        if k == "fetch":
            _, dst, tab, r, f = op
            regs[dst] = B.fetch("Mt" if tab == "T" else "Ms", T if tab == "T" else S,
                                regs[r][f])
            continue
        if k == "eqf":
            bit = B.eq(regs[op[1]][op[2]], regs[op[3]][op[4]])
        elif k == "nef":
            bit = B.not_(B.eq(regs[op[1]][op[2]], regs[op[3]][op[4]]))
        elif k == "eqc":
            bit = B.eq(regs[op[1]][op[2]], B.const(op[3]))
        elif k == "nec":
            bit = B.not_(B.eq(regs[op[1]][op[2]], B.const(op[3])))
        elif k == "in":
            v = regs[op[1]][op[2]]
            bit = B.const(0)
            for c in op[3]:
                bit = B.or_(bit, B.eq(v, B.const(c)))
        elif k == "succ":
            bit = B.eq(regs[op[1]][op[2]], B.add(regs[op[3]][op[4]], B.const(1)))
        elif k == "eqn":
            bit = B.eq(regs[op[1]][op[2]], nn)
        elif k == "ltn":
            bit = B.lt(regs[op[1]][op[2]], nn)
        elif k == "rev":
            bit = _zk_rev(B, T, S, n, nu, regs[op[1]][op[2]], regs[op[3]][op[4]],
                          regs[op[5]][op[6]])
        elif k == "ext":
            bit = _zk_ext(B, T, S, n, nu, regs[op[1]][op[2]], regs[op[3]][op[4]],
                          regs[op[5]][op[6]])
        else:
            raise AssertionError(k)
        ok = B.and_(ok, bit)
    return ok


def _commit(B, name, table):
    if hasattr(B, "commit_table"):
        return B.commit_table(name, table)
    return table


def check_reverse(t: ProofTables, chain: int, s: int, base: Optional[int] = None,
                  backend=None) -> bool:
    """Is the derivative chain at ``chain`` the string at ``s`` reversed?

    Follows the padded loop: ``nu`` iterations, masked once past the
    string's height, with positions joined to characters and compared as
    multisets.  With ``base`` set, the chain must end at that row;
    without it, the chain must not continue past the string's length.
    """
    B = backend or PlainBackend()
    T = _commit(B, "Mt", t.terms)
    S = _commit(B, "Ms", t.strings)
    w = B.commit if hasattr(B, "commit") else B.const
    bit = _zk_rev(B, T, S, t.n, t.nu, w(chain), w(s), None if base is None else w(base))
    return B.reveal(bit) and not B.invalid


def sync_extend_scan(t: ProofTables, sc: int, s: int, c: int, backend=None) -> bool:
    """Is the string at ``sc`` equal to the string at ``s`` followed by ``c``?"""
    B = backend or PlainBackend()
    T = _commit(B, "Mt", t.terms)
    S = _commit(B, "Ms", t.strings)
    w = B.commit if hasattr(B, "commit") else B.const
    bit = _zk_ext(B, T, S, t.n, t.nu, w(sc), w(s), w(c))
    return B.reveal(bit) and not B.invalid


def permute_check(D, pi: int, backend=None) -> bool:
    """Is ``D`` a permutation of ``0 .. pi-1``?  Polynomial identity test."""
    B = backend or PlainBackend()
    if len(D) != pi:
        return False
    ref = [B.const(i) for i in range(pi)]
    return B.reveal(B.multiset_eq(list(D), ref))


# ------------------------------------------------------- consistency

def consistency_check(t: ProofTables) -> tuple:
    """Structural table invariants.  Returns ``(ok, reason)``."""
    n, nu = t.n, t.nu
    for i, (kind, imm, x, y) in enumerate(t.terms):
        if not 0 <= kind < len(Kind):
            return False, f"term row {i}: unknown kind {kind}"
        k = Kind(kind)
        if k in (Kind.CHAR, Kind.DERIV) and imm >= n:
            return False, f"term row {i}: character {imm} outside alphabet of {n}"
        ar = TERM_ARITY[k]
        if (ar >= 1 and x >= i) or (ar >= 2 and y >= i):
            return False, f"term row {i}: child index not below own index"
    terminators = 0
    for i, (imm, tail, h) in enumerate(t.strings):
        if h == 0:
            terminators += 1
            continue
        if tail >= i:
            return False, f"string row {i}: tail index not below own index"
        if h != t.strings[tail][2] + 1:
            return False, f"string row {i}: height {h} breaks the +1 law"
        if h > nu:
            return False, f"string row {i}: height {h} exceeds nu={nu}"
        if imm >= n:
            return False, f"string row {i}: character {imm} outside alphabet of {n}"
    if terminators != 1:
        return False, f"{terminators} terminator rows"
    return True, ""


def _zk_consistency(B, T, S, n, nu):
    ok = B.const(1)
    nn = B.const(n)
    kinds_x = [int(k) for k in Kind if TERM_ARITY[k] >= 1]
    kinds_y = [int(k) for k in Kind if TERM_ARITY[k] >= 2]
    for i, row in enumerate(T):
        row = B.scan("Mt", row)
        ii = B.const(i)
        valid = B.lt(row[0], B.const(len(Kind)))
        has_imm = B.or_(B.eq(row[0], B.const(int(Kind.CHAR))),
                        B.eq(row[0], B.const(_DERIV)))
        ok = B.and_(ok, valid)
        ok = B.and_(ok, B.or_(B.not_(has_imm), B.lt(row[1], nn)))
        ux = B.const(0)
        for k in kinds_x:
            ux = B.or_(ux, B.eq(row[0], B.const(k)))
        uy = B.const(0)
        for k in kinds_y:
            uy = B.or_(uy, B.eq(row[0], B.const(k)))
        ok = B.and_(ok, B.or_(B.not_(ux), B.lt(row[2], ii)))
        ok = B.and_(ok, B.or_(B.not_(uy), B.lt(row[3], ii)))
    term_count = B.const(0)
    for i, row in enumerate(S):
        row = B.scan("Ms", row)
        is_term = B.eq(row[2], B.const(0))
        term_count = B.add(term_count, is_term)
        tail = B.fetch("Ms", S, row[1])
        good = B.and_(B.lt(row[1], B.const(i)),
                      B.eq(row[2], B.add(tail[2], B.const(1))))
        good = B.and_(good, B.not_(B.lt(B.const(nu), row[2])))
        good = B.and_(good, B.lt(row[0], nn))
        ok = B.and_(ok, B.or_(is_term, good))
    return B.and_(ok, B.eq(term_count, B.const(1)))


# ------------------------------------------------------------ validation

@dataclass
class ValidationReport:
    """Verdict plus what the validation leaks: size parameters and counts."""

    ok: bool
    phase: str = ""
    message: str = ""
    failures: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    category_counts: list = field(default_factory=list)
    mux: str = ""
    timings: dict = field(default_factory=dict)
    transcript: object = None

    def __bool__(self):
        return self.ok

    def summary(self) -> str:
        p = self.params
        lines = [f"verdict: {'VALID' if self.ok else 'INVALID'}",
                 "size: " + " ".join(f"{k}={v}" for k, v in p.items()),
                 f"mux: {self.mux}",
                 "steps per category: " + " ".join(
                     f"{i}:{c}" for i, c in enumerate(self.category_counts)),
                 "timings: " + " ".join(f"{k}={v:.4f}s" for k, v in self.timings.items())]
        if not self.ok:
            lines.insert(1, f"first failure: {self.phase}: {self.message}")
        return "\n".join(lines)


def _order(t: ProofTables) -> list:
    # catId is public, so processing steps grouped by category leaks nothing new
    return sorted(range(t.pi), key=lambda i: (t.steps[i][2], i))


def validate(t: ProofTables, mux: Optional[MuxConfig] = None, backend=None,
             seed: int = 0) -> ValidationReport:
    """Validate proof tables.

    ``mux`` defaults to the categories recorded in the tables; a different
    configuration relabels categories from the rule column first.  With a
    :class:`~rexproof.zksim.ZkBackend` every operation goes through the
    backend and is recorded; otherwise the compiled plaintext engine runs.
    """
    if mux is not None and mux.categories != t.mux.categories:
        t = recategorize(t, mux)
    report = ValidationReport(True, params=t.size_params(),
                              category_counts=t.category_counts(), mux=t.mux.mode)

    def fail(phase, msg, where=None):
        report.failures.append((phase, where, msg))
        if report.ok:
            report.ok, report.phase, report.message = False, phase, msg

    t0 = time.perf_counter()
    problem = index_problem(t)
    if problem:
        fail("structure", problem)
        return report
    if t.n > 256:
        fail("structure", "alphabet larger than 256 characters")
        return report
    if backend is not None and getattr(backend, "zk", False):
        _validate_zk(t, backend, fail, report, t0)
    else:
        _validate_plain(t, backend or PlainBackend(seed), fail, report, t0)
    return report


def _bookend_counts(t, fail):
    counts = t.category_counts()
    for name, cat in (("Assume", t.mux.assume_cat), ("Contra", t.mux.contra_cat)):
        if counts[cat] != 1:
            fail("bookend", f"{counts[cat]} steps in the {name} category")


def _validate_plain(t, B, fail, report, t0):
    F, T, S, P = t.formulas, t.terms, t.strings, t.steps
    n, nu = t.n, t.nu
    cats = t.mux.categories
    ncat = len(cats)
    checks = [[(r, PLAIN[r]) for r in sorted(c)] for c in cats]
    assume_cat = t.mux.assume_cat
    D = []
    for i in _order(t):
        sid, rule, cat, res, p0, p1 = P[i]
        if cat >= ncat:
            fail("rule", f"step row {i}: unknown category {cat}", i)
            D.append(sid)
            continue
        f0 = F[res]
        s1, s2 = P[p0], P[p1]
        f1, f2 = F[s1[3]], F[s2[3]]
        ok = False
        # trying the declared rule first is only a shortcut; the verdict is
        # the disjunction over the whole category either way
        for r, fn in checks[cat]:
            if r == rule and fn(f0, f1, f2, T, S, n, nu):
                ok = True
                break
        if not ok:
            for r, fn in checks[cat]:
                if fn(f0, f1, f2, T, S, n, nu):
                    ok = True
                    break
        if not ok:
            fail("rule", f"step row {i} (id {sid}): no instruction in category {cat} accepts",
                 i)
        if cat != assume_cat and not (s1[0] < sid and s2[0] < sid):
            fail("cycle", f"step row {i} (id {sid}): premise id not lower", i)
        D.append(sid)
    t1 = time.perf_counter()
    _bookend_counts(t, fail)
    if not permute_check(D, t.pi, B):
        fail("permutation", "step ids are not a permutation of 0..pi-1")
    t2 = time.perf_counter()
    ok, why = consistency_check(t)
    if not ok:
        fail("consistency", why)
    t3 = time.perf_counter()
    report.timings = {"steps": t1 - t0, "permutation": t2 - t1, "consistency": t3 - t2,
                      "total": t3 - t0}


def _validate_zk(t, B, fail, report, t0):
    T = B.commit_table("Mt", t.terms)
    S = B.commit_table("Ms", t.strings)
    F = B.commit_table("Mf", t.formulas)
    P = B.commit_table("Mp", t.steps)
    n, nu = t.n, t.nu
    cats = t.mux.categories
    assume_cat = t.mux.assume_cat
    D = []
    for i in _order(t):
        cat = t.steps[i][2]     # public
        row = B.scan("Mp", P[i])
        f0 = B.fetch("Mf", F, row[3])
        s1 = B.fetch("Mp", P, row[4])
        s2 = B.fetch("Mp", P, row[5])
        f1 = B.fetch("Mf", F, s1[3])
        f2 = B.fetch("Mf", F, s2[3])
        if cat >= len(cats):
            fail("rule", f"step row {i}: unknown category {cat}", i)
            D.append(row[0])
            continue
        z = B.const(0)
        for r in sorted(cats[cat]):
            z = B.or_(z, run_instr(B, OPS[r], f0, f1, f2, T, S, n, nu))
        if not B.reveal(z):
            fail("rule", f"step row {i}: no instruction in category {cat} accepts", i)
        if cat != assume_cat:
            c = B.and_(B.lt(s1[0], row[0]), B.lt(s2[0], row[0]))
            if not B.reveal(c):
                fail("cycle", f"step row {i}: premise id not lower", i)
        D.append(row[0])
    t1 = time.perf_counter()
    _bookend_counts(t, fail)
    if not permute_check(D, t.pi, B):
        fail("permutation", "step ids are not a permutation of 0..pi-1")
    t2 = time.perf_counter()
    if not B.reveal(_zk_consistency(B, T, S, n, nu)):
        fail("consistency", consistency_check(t)[1] or "consistency check failed")
    if B.invalid:
        fail("structure", "out-of-bounds memory access")
    t3 = time.perf_counter()
    report.timings = {"steps": t1 - t0, "permutation": t2 - t1, "consistency": t3 - t2,
                      "total": t3 - t0}
    report.transcript = B.transcript
