"""Flat table encoding of proofs, padding, and the on-disk format.

Row layouts (all fields are non-negative integers):

* term row ``(kind, imm, x, y)``; unused child slots are 0
* string row ``(imm, tail, height)``; row 0 is the terminator ``(0, 0, 0)``
* formula row ``(kind, k, s, a, b)``; ``s`` indexes the string table,
  ``a``/``b`` the term table, unused slots are 0
* step row ``(step_id, rule, cat, res, prem0, prem1)``; ``res`` indexes the
  formula table, ``prem0``/``prem1`` index the step table itself
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .calculus import Formula, FormulaKind, ProofStep, RuleId, walk
from .mux import DEFAULT, MuxConfig
from .terms import ARITY as TERM_ARITY
from .terms import EMPTY, BLANK, Kind, Term

FORMAT_VERSION = 1
MAGIC = "rexproof-tables"

TERM_FIELDS = ("kind", "imm", "x", "y")
STRING_FIELDS = ("imm", "tail", "height")
FORMULA_FIELDS = ("kind", "k", "s", "a", "b")
STEP_FIELDS = ("step_id", "rule", "cat", "res", "prem0", "prem1")


class TableFormatError(ValueError):
    """The serialized tables are malformed; raised before any validation."""


class CapacityError(ValueError):
    """Requested size parameters are smaller than the proof needs."""


@dataclass
class ProofTables:
    n: int
    nu: int
    terms: list
    strings: list
    formulas: list
    steps: list
    mux: MuxConfig = DEFAULT
    alphabet: list = field(default_factory=list)

    @property
    def chi(self) -> int:
        return len(self.terms)

    @property
    def xi(self) -> int:
        return len(self.strings)

    @property
    def pi(self) -> int:
        return len(self.steps)

    def size_params(self) -> dict:
        return {"n": self.n, "chi": self.chi, "xi": self.xi, "pi": self.pi, "nu": self.nu}

    def category_counts(self) -> list:
        counts = [0] * len(self.mux.categories)
        for row in self.steps:
            if 0 <= row[2] < len(counts):
                counts[row[2]] += 1
        return counts

    def copy(self) -> "ProofTables":
        return ProofTables(self.n, self.nu, list(self.terms), list(self.strings),
                           list(self.formulas), list(self.steps), self.mux,
                           list(self.alphabet))

    def __eq__(self, other):
        if not isinstance(other, ProofTables):
            return NotImplemented
        return (self.n, self.nu, self.terms, self.strings, self.formulas, self.steps,
                self.mux.categories, list(self.alphabet)) == (
                other.n, other.nu, other.terms, other.strings, other.formulas,
                other.steps, other.mux.categories, list(other.alphabet))


# ----------------------------------------------------------------- lowering

class TableBuilder:
    """Hash-consing row allocator for terms and strings."""

    def __init__(self):
        self.terms = []
        self.term_idx = {}
        self.strings = [(0, 0, 0)]
        self.string_idx = {(): 0}
        self.term(EMPTY)
        self.term(BLANK)

    def term(self, t: Term) -> int:
        i = self.term_idx.get(t)
        if i is not None:
            return i
        stack = [t]
        while stack:
            cur = stack[-1]
            if cur in self.term_idx:
                stack.pop()
                continue
            todo = [c for c in cur.children if c not in self.term_idx]
            if todo:
                stack.extend(todo)
                continue
            stack.pop()
            kids = [self.term_idx[c] for c in cur.children] + [0, 0]
            self.term_idx[cur] = len(self.terms)
            self.terms.append((int(cur.kind), cur.imm, kids[0], kids[1]))
        return self.term_idx[t]

    def string(self, s: tuple) -> int:
        i = self.string_idx.get(s)
        if i is not None:
            return i
        tail = self.string(s[1:])
        i = len(self.strings)
        self.strings.append((s[0], tail, len(s)))
        self.string_idx[s] = i
        return i

    def formula(self, f: Formula) -> tuple:
        s = self.string(f.s) if f.kind in (FormulaKind.SYNC, FormulaKind.SYNCUPTO) else 0
        a = self.term(f.p) if f.p is not None else 0
        b = self.term(f.q) if f.q is not None else 0
        return (int(f.kind), f.k, s, a, b)


@dataclass
class PadSpec:
    """Target size parameters; ``None`` leaves a parameter at its minimum.

    ``counts`` maps catId to the desired number of steps in that category.
    """

    chi: Optional[int] = None
    xi: Optional[int] = None
    nu: Optional[int] = None
    counts: Optional[dict] = None

    @classmethod
    def matching(cls, *tables: ProofTables) -> "PadSpec":
        """Smallest padding target covering every given lowering."""
        counts = {}
        for t in tables:
            for i, c in enumerate(t.category_counts()):
                counts[i] = max(counts.get(i, 0), c)
        return cls(max(t.chi for t in tables), max(t.xi for t in tables),
                   max(t.nu for t in tables), counts)


def _order_steps(root: ProofStep) -> list:
    order = list(walk(root))
    assumes = [s for s in order if s.rule is RuleId.Assume]
    if len(assumes) != 1 or root.rule is not RuleId.Contra:
        raise ValueError("proof must be bookended by one Assume and a Contra root")
    return assumes + [s for s in order if s is not assumes[0]]


def _pad_step(rule_set, eq_formula, b: TableBuilder):
    """A well-formed dummy step ``(rule, premise_is_eq, conclusion)``."""
    if RuleId.Refl in rule_set:
        return RuleId.Refl, False, Formula(FormulaKind.EQ, 0, (), EMPTY, EMPTY)
    if eq_formula is not None and RuleId.Symm in rule_set:
        return RuleId.Symm, True, Formula(FormulaKind.EQ, 0, (), eq_formula.q, eq_formula.p)
    if eq_formula is not None and RuleId.EqualSync in rule_set:
        return RuleId.EqualSync, True, Formula(FormulaKind.SYNC, 0, (), eq_formula.p,
                                               eq_formula.q)
    raise CapacityError("cannot pad a category without Refl, Symm or EqualSync")


def lower_proof(root: ProofStep, n: int, alphabet: Sequence[str] | None = None,
                mux: MuxConfig = DEFAULT, seed: int = 0,
                pad: Optional[PadSpec] = None) -> ProofTables:
    """Encode a bookended proof as tables.

    Terms and strings are hash-consed with children before parents.  Step
    ids follow a topological order with the Assume at 0; the physical step
    rows and formula rows are then shuffled independently with ``seed``.
    """
    steps = _order_steps(root)
    b = TableBuilder()
    concl = [b.formula(st.conclusion) for st in steps]
    sid = {id(st): i for i, st in enumerate(steps)}
    entries = []  # (rule, premise step ids, formula row)
    for st, f in zip(steps, concl):
        entries.append((st.rule, [sid[id(p)] for p in st.premises], f))

    if pad is not None and pad.counts:
        counts = [0] * len(mux.categories)
        for rule, _, _ in entries:
            counts[mux.cat_of(rule)] += 1
        eq_src = next((i for i, st in enumerate(steps)
                       if st.conclusion.kind is FormulaKind.EQ), None)
        eq_f = steps[eq_src].conclusion if eq_src is not None else None
        for cat in sorted(pad.counts):
            want = pad.counts[cat]
            if want < counts[cat]:
                raise CapacityError(f"category {cat} needs {counts[cat]} steps, "
                                    f"asked for {want}")
            if want > counts[cat]:
                rule, uses_eq, f = _pad_step(mux.categories[cat], eq_f, b)
                row = b.formula(f)
                for _ in range(want - counts[cat]):
                    entries.append((rule, [eq_src] if uses_eq else [], row))

    if pad is not None and pad.chi is not None:
        if pad.chi < len(b.terms):
            raise CapacityError(f"term table needs {len(b.terms)} rows")
        t = EMPTY
        while len(b.terms) < pad.chi:
            t = Term(Kind.STAR, 0, t)
            b.term(t)
    nu = max(h for _, _, h in b.strings)
    if pad is not None and pad.nu is not None:
        if pad.nu < nu:
            raise CapacityError(f"strings need nu >= {nu}")
        nu = pad.nu
    if pad is not None and pad.xi is not None:
        if pad.xi < len(b.strings):
            raise CapacityError(f"string table needs {len(b.strings)} rows")
        frontier = [()]
        while len(b.strings) < pad.xi and frontier:
            nxt = []
            for s in frontier:
                if len(s) >= nu:
                    continue
                for c in range(n):
                    if len(b.strings) >= pad.xi:
                        break
                    cs = (c,) + s
                    b.string(cs)
                    nxt.append(cs)
            frontier = nxt
        while len(b.strings) < pad.xi:
            b.strings.append((0, 0, 1))

    rng = random.Random(seed)
    pi = len(entries)
    pos = list(range(pi))
    rng.shuffle(pos)        # step id -> physical step row
    fpos = list(range(pi))
    rng.shuffle(fpos)       # step id -> physical formula row
    formulas = [None] * pi
    rows = [None] * pi
    assume_pos = pos[0]
    for i, (rule, prem, f) in enumerate(entries):
        formulas[fpos[i]] = f
        slots = [pos[j] for j in prem] + [assume_pos] * (2 - len(prem))
        rows[pos[i]] = (i, int(rule), mux.cat_of(rule), fpos[i], slots[0], slots[1])
    return ProofTables(n, nu, b.terms, b.strings, formulas, rows, mux,
                       list(alphabet) if alphabet is not None else [])


def recategorize(t: ProofTables, mux: MuxConfig) -> ProofTables:
    """Relabel catIds for another mux configuration using the rule column."""
    out = t.copy()
    out.mux = mux
    out.steps = [(a, r, mux.cat_of(RuleId(r)) if 0 <= r < len(RuleId) else c, res, p0, p1)
                 for (a, r, c, res, p0, p1) in t.steps]
    return out


# ------------------------------------------------------------------ lifting

class LiftError(ValueError):
    pass


def lift_terms(t: ProofTables) -> list:
    out = []
    for i, (kind, imm, x, y) in enumerate(t.terms):
        try:
            k = Kind(kind)
        except ValueError:
            raise LiftError(f"term row {i}: bad kind {kind}")
        kids = (x, y)[:TERM_ARITY[k]]
        if any(c >= i for c in kids):
            raise LiftError(f"term row {i}: forward reference")
        out.append(Term(k, imm if k in (Kind.CHAR, Kind.DERIV) else 0,
                        *(out[c] for c in kids)))
    return out


def lift_strings(t: ProofTables) -> list:
    out = [None] * len(t.strings)
    for i, (imm, tail, h) in enumerate(t.strings):
        if h == 0:
            out[i] = ()
        elif tail < i and out[tail] is not None:
            out[i] = (imm,) + out[tail]
        else:
            raise LiftError(f"string row {i}: bad tail")
    return out


def lift_formula(row, terms, strings) -> Formula:
    kind, k, s, a, b = row
    try:
        fk = FormulaKind(kind)
    except ValueError:
        raise LiftError(f"bad formula kind {kind}")
    if fk is FormulaKind.BOTTOM:
        return Formula(fk)
    has_s = fk in (FormulaKind.SYNC, FormulaKind.SYNCUPTO)
    has_k = fk in (FormulaKind.AGREE, FormulaKind.SYNCUPTO)
    return Formula(fk, k if has_k else 0, strings[s] if has_s else (), terms[a], terms[b])


def lift_proof(t: ProofTables) -> ProofStep:
    """Rebuild a step graph from tables, trusting only the table contents.

    Steps in the Assume category get no premises; every other step keeps
    both premise slots, since the rule column is not trusted.  Returns the
    Contra-category step.
    """
    terms = lift_terms(t)
    strings = lift_strings(t)
    assume_cat = t.mux.assume_cat
    contra_cat = t.mux.contra_cat
    by_pos = {}
    order = sorted(range(t.pi), key=lambda i: t.steps[i][0])
    for i in order:
        sid, rule, cat, res, p0, p1 = t.steps[i]
        f = lift_formula(t.formulas[res], terms, strings)
        if cat == assume_cat:
            prems = ()
        else:
            if p0 not in by_pos or p1 not in by_pos:
                raise LiftError(f"step {sid}: premise not yet defined")
            prems = (by_pos[p0], by_pos[p1])
        by_pos[i] = ProofStep(RuleId(rule) if 0 <= rule < len(RuleId) else RuleId.Refl,
                              prems, f)
    roots = [by_pos[i] for i in range(t.pi) if t.steps[i][2] == contra_cat]
    if len(roots) != 1:
        raise LiftError("expected exactly one Contra-category step")
    return roots[0]


# ------------------------------------------------------------ serialization

def _rule_names(cat) -> str:
    return " ".join(RuleId(r).name for r in sorted(cat))


def serialize(t: ProofTables) -> bytes:
    """Deterministic line-oriented text encoding."""
    out = [f"{MAGIC} {FORMAT_VERSION}",
           "alphabet " + json.dumps(list(t.alphabet), ensure_ascii=False),
           f"params n={t.n} chi={t.chi} xi={t.xi} pi={t.pi} nu={t.nu}",
           f"mux {t.mux.mode} {len(t.mux.categories)}"]
    for i, cat in enumerate(t.mux.categories):
        out.append(f"cat {i} {_rule_names(cat)}")
    for tag, rows in (("t", t.terms), ("s", t.strings), ("f", t.formulas), ("p", t.steps)):
        for row in rows:
            out.append(tag + " " + " ".join(str(v) for v in row))
    out.append("end")
    return ("\n".join(out) + "\n").encode("utf-8")


def deserialize(data: bytes) -> ProofTables:
    """Parse and range-check a serialized table set."""
    try:
        text = data.decode("utf-8")
    except (UnicodeDecodeError, AttributeError):
        raise TableFormatError("not a UTF-8 text proof file")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    it = iter(enumerate(lines, 1))

    def nxt(prefix):
        try:
            no, line = next(it)
        except StopIteration:
            raise TableFormatError(f"unexpected end of file, wanted {prefix!r}")
        if not line.startswith(prefix + " ") and line != prefix:
            raise TableFormatError(f"line {no}: expected {prefix!r}")
        return no, line[len(prefix):].strip()

    _, ver = nxt(MAGIC)
    if ver != str(FORMAT_VERSION):
        raise TableFormatError(f"unsupported format version {ver!r}")
    _, alpha = nxt("alphabet")
    try:
        alphabet = json.loads(alpha)
        assert isinstance(alphabet, list) and all(isinstance(a, str) for a in alphabet)
    except Exception:
        raise TableFormatError("bad alphabet line")
    no, params = nxt("params")
    try:
        kv = dict(p.split("=") for p in params.split())
        n, chi, xi, pi, nu = (int(kv[k]) for k in ("n", "chi", "xi", "pi", "nu"))
    except Exception:
        raise TableFormatError(f"line {no}: bad size parameters")
    if min(n, chi, xi, pi, nu) < 0:
        raise TableFormatError(f"line {no}: negative size parameter")
    no, muxline = nxt("mux")
    try:
        mode, ncat = muxline.split()
        ncat = int(ncat)
    except ValueError:
        raise TableFormatError(f"line {no}: bad mux line")
    cats = []
    for i in range(ncat):
        no, rest = nxt("cat")
        parts = rest.split()
        if not parts or parts[0] != str(i):
            raise TableFormatError(f"line {no}: category out of order")
        try:
            cats.append(frozenset(RuleId[name] for name in parts[1:]))
        except KeyError as e:
            raise TableFormatError(f"line {no}: unknown rule {e}")
    seen = set()
    for c in cats:
        if c & seen:
            raise TableFormatError("categories overlap")
        seen |= c
    if seen != set(RuleId):
        raise TableFormatError("categories do not cover every rule")
    mux = MuxConfig(mode, tuple(cats))

    def rows(tag, count, width):
        out = []
        for _ in range(count):
            no, rest = nxt(tag)
            try:
                vals = tuple(int(v) for v in rest.split())
            except ValueError:
                raise TableFormatError(f"line {no}: non-integer field")
            if len(vals) != width or min(vals) < 0:
                raise TableFormatError(f"line {no}: malformed row")
            out.append(vals)
        return out

    terms = rows("t", chi, 4)
    strings = rows("s", xi, 3)
    formulas = rows("f", pi, 5)
    steps = rows("p", pi, 6)
    nxt("end")
    if next(it, None) is not None:
        raise TableFormatError("trailing data after end marker")
    t = ProofTables(n, nu, terms, strings, formulas, steps, mux, alphabet)
    problem = index_problem(t)
    if problem:
        raise TableFormatError(problem)
    return t


def index_problem(t: ProofTables) -> str:
    """First pointer field that falls outside its table, or ``""``."""
    chi, xi, pi = t.chi, t.xi, t.pi
    if xi == 0:
        return "string table is empty"
    if chi == 0:
        return "term table is empty"
    if len(t.formulas) != pi:
        return "formula and step tables differ in length"
    for i, r in enumerate(t.terms):
        if len(r) != 4 or min(r) < 0 or r[2] >= chi or r[3] >= chi:
            return f"term row {i}: index out of range"
    for i, r in enumerate(t.strings):
        if len(r) != 3 or min(r) < 0 or r[1] >= xi:
            return f"string row {i}: index out of range"
    for i, r in enumerate(t.formulas):
        if len(r) != 5 or min(r) < 0 or r[2] >= xi or r[3] >= chi or r[4] >= chi:
            return f"formula row {i}: index out of range"
    for i, r in enumerate(t.steps):
        if len(r) != 6 or min(r) < 0 or r[3] >= pi or r[4] >= pi or r[5] >= pi:
            return f"step row {i}: index out of range"
    return ""


def save(t: ProofTables, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(t))


def load(path: str) -> ProofTables:
    with open(path, "rb") as fh:
        return deserialize(fh.read())
