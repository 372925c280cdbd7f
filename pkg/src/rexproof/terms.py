"""Regular expression terms, derivatives, reduction and normal forms.

Terms are hash-consed: building the same structure twice returns the same
object, so structural equality is identity and hashing is O(1).  Characters
are dense integer codes ``0..n-1`` into an ordered alphabet.
"""

from __future__ import annotations

import enum
import functools
import sys
from typing import Iterable, Sequence


class Kind(enum.IntEnum):
    # The numeric values double as the rank used by term_compare.
    EMPTY = 0
    BLANK = 1
    CHAR = 2
    STAR = 3
    CONCAT = 4
    UNION = 5
    EPS = 6
    DERIV = 7


ARITY = {
    Kind.EMPTY: 0, Kind.BLANK: 0, Kind.CHAR: 0,
    Kind.STAR: 1, Kind.EPS: 1, Kind.DERIV: 1,
    Kind.CONCAT: 2, Kind.UNION: 2,
}

_HAS_IMM = (Kind.CHAR, Kind.DERIV)


class Term:
    """An immutable, interned AST node.

    ``imm`` is the character code for ``CHAR`` and ``DERIV`` nodes and 0
    otherwise.  ``x``/``y`` are the children (``None`` when absent).
    """

    __slots__ = ("kind", "imm", "x", "y", "regex", "depth", "__weakref__")

    _table: dict = {}

    def __new__(cls, kind, imm=0, x=None, y=None):
        key = (kind, imm, x, y)
        t = cls._table.get(key)
        if t is not None:
            return t
        t = object.__new__(cls)
        object.__setattr__(t, "kind", Kind(kind))
        object.__setattr__(t, "imm", imm)
        object.__setattr__(t, "x", x)
        object.__setattr__(t, "y", y)
        regex = kind not in (Kind.EPS, Kind.DERIV)
        depth = 0
        for c in (x, y):
            if c is not None:
                regex = regex and c.regex
                depth = max(depth, c.depth + 1)
        object.__setattr__(t, "regex", regex)
        object.__setattr__(t, "depth", depth)
        return cls._table.setdefault(key, t)

    def __setattr__(self, name, value):
        raise AttributeError("Term is immutable")

    def __reduce__(self):
        return (Term, (self.kind, self.imm, self.x, self.y))

    @property
    def children(self) -> tuple:
        if self.x is None:
            return ()
        if self.y is None:
            return (self.x,)
        return (self.x, self.y)

    def __repr__(self):
        return f"Term({to_sexpr(self)})"

    def __lt__(self, other):
        return term_compare(self, other) < 0


EMPTY = Term(Kind.EMPTY)
BLANK = Term(Kind.BLANK)


def char(c: int) -> Term:
    return Term(Kind.CHAR, c)


def cat(x: Term, y: Term) -> Term:
    return Term(Kind.CONCAT, 0, x, y)


def alt(x: Term, y: Term) -> Term:
    return Term(Kind.UNION, 0, x, y)


def star(x: Term) -> Term:
    return Term(Kind.STAR, 0, x)


def eps(x: Term) -> Term:
    return Term(Kind.EPS, 0, x)


def der(c: int, x: Term) -> Term:
    return Term(Kind.DERIV, c, x)


def der_chain(s: Sequence[int], p: Term) -> Term:
    """The derivative of ``p`` by string ``s``, stored innermost-first."""
    for c in s:
        p = der(c, p)
    return p


def term_size(p: Term) -> int:
    return 1 + sum(term_size(c) for c in p.children)


def chars_of(p: Term) -> set:
    out = set()
    stack = [p]
    while stack:
        t = stack.pop()
        if t.kind in _HAS_IMM:
            out.add(t.imm)
        stack.extend(t.children)
    return out


# ---------------------------------------------------------------- parsing

class RegexSyntaxError(ValueError):
    pass


_OPERATORS = set("|*+?()")
_BLANK_TOKENS = ("ε",)
_EMPTY_TOKENS = ("∅",)


def infer_alphabet(*texts: str) -> list:
    """Sorted list of the literal characters used by the given regexes."""
    seen = set()
    for text in texts:
        for ch in text:
            if ch in _OPERATORS or ch.isspace() or ch in _BLANK_TOKENS or ch in _EMPTY_TOKENS:
                continue
            seen.add(ch)
    return sorted(seen)


class _Parser:
    def __init__(self, text, alphabet):
        self.toks = [ch for ch in text if not ch.isspace()]
        self.pos = 0
        self.codes = {ch: i for i, ch in enumerate(alphabet)}

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def error(self, msg):
        raise RegexSyntaxError(f"{msg} at position {self.pos}")

    def parse(self):
        if not self.toks:
            self.error("empty pattern")
        t = self.alternation()
        if self.peek() is not None:
            self.error(f"unexpected {self.peek()!r}")
        return t

    def alternation(self):
        parts = [self.sequence()]
        while self.peek() == "|":
            self.pos += 1
            parts.append(self.sequence())
        t = parts[-1]
        for p in reversed(parts[:-1]):
            t = alt(p, t)
        return t

    def sequence(self):
        items = []
        while self.peek() is not None and self.peek() not in "|)":
            items.append(self.postfix())
        if not items:
            self.error("dangling operator")
        t = items[-1]
        for p in reversed(items[:-1]):
            t = cat(p, t)
        return t

    def postfix(self):
        t = self.atom()
        while self.peek() is not None and self.peek() in "*+?":
            op = self.toks[self.pos]
            self.pos += 1
            if op == "*":
                t = star(t)
            elif op == "+":
                t = cat(t, star(t))
            else:
                t = alt(t, BLANK)
        return t

    def atom(self):
        ch = self.peek()
        if ch is None:
            self.error("unexpected end of pattern")
        if ch == "(":
            self.pos += 1
            if self.peek() == ")":
                self.pos += 1
                return BLANK
            t = self.alternation()
            if self.peek() != ")":
                self.error("unbalanced parenthesis")
            self.pos += 1
            return t
        if ch in "|)*+?":
            self.error(f"dangling operator {ch!r}")
        self.pos += 1
        if ch in _BLANK_TOKENS:
            return BLANK
        if ch in _EMPTY_TOKENS:
            return EMPTY
        if ch not in self.codes:
            raise RegexSyntaxError(f"character {ch!r} is not in the alphabet")
        return char(self.codes[ch])


def parse_regex(text: str, alphabet: Sequence[str]) -> Term:
    """Parse ``text`` into a regular expression over ``alphabet``.

    Supports ``|``, juxtaposition, ``*``, ``+``, ``?`` and parentheses.
    ``()`` or ``ε`` denotes the empty string, ``∅`` the empty language.
    Unions and concatenations nest to the right.
    """
    return _Parser(text, list(alphabet)).parse()


def _char_name(c, alphabet):
    if alphabet is not None and c < len(alphabet):
        return alphabet[c]
    return chr(ord("a") + c) if c < 26 else f"#{c}"


def to_text(p: Term, alphabet: Sequence[str] | None = None) -> str:
    """Infix rendering; regular expressions round-trip through parse_regex."""
    def go(t, prec):
        k = t.kind
        if k is Kind.EMPTY:
            return "∅"
        if k is Kind.BLANK:
            return "ε"
        if k is Kind.CHAR:
            return _char_name(t.imm, alphabet)
        if k is Kind.STAR:
            return go(t.x, 2) + "*"
        if k is Kind.EPS:
            return "E(" + go(t.x, 0) + ")"
        if k is Kind.DERIV:
            return "δ" + _char_name(t.imm, alphabet) + "(" + go(t.x, 0) + ")"
        if k is Kind.CONCAT:
            s = go(t.x, 2) + go(t.y, 1)
            return s if prec <= 1 else "(" + s + ")"
        s = go(t.x, 1) + "|" + go(t.y, 0)
        return s if prec == 0 else "(" + s + ")"
    return go(p, 0)


_SEXPR_HEAD = {Kind.STAR: "star", Kind.CONCAT: "cat", Kind.UNION: "alt",
               Kind.EPS: "eps", Kind.DERIV: "der"}
_SEXPR_KIND = {v: k for k, v in _SEXPR_HEAD.items()}


def to_sexpr(p: Term, alphabet: Sequence[str] | None = None) -> str:
    k = p.kind
    if k is Kind.EMPTY:
        return "empty"
    if k is Kind.BLANK:
        return "blank"
    if k is Kind.CHAR:
        return _char_name(p.imm, alphabet)
    parts = [_SEXPR_HEAD[k]]
    if k is Kind.DERIV:
        parts.append(_char_name(p.imm, alphabet))
    parts.extend(to_sexpr(c, alphabet) for c in p.children)
    return "(" + " ".join(parts) + ")"


def parse_sexpr(text: str, alphabet: Sequence[str] | None = None) -> Term:
    """Inverse of :func:`to_sexpr`; accepts epsilon and derivative nodes."""
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def code(name):
        if alphabet is not None:
            if name not in alphabet:
                raise RegexSyntaxError(f"character {name!r} is not in the alphabet")
            return list(alphabet).index(name)
        if len(name) == 1 and "a" <= name <= "z":
            return ord(name) - ord("a")
        if name.startswith("#"):
            return int(name[1:])
        raise RegexSyntaxError(f"bad character {name!r}")

    def go():
        nonlocal pos
        if pos >= len(toks):
            raise RegexSyntaxError("unexpected end of s-expression")
        tok = toks[pos]
        pos += 1
        if tok == "empty":
            return EMPTY
        if tok == "blank":
            return BLANK
        if tok == ")":
            raise RegexSyntaxError("unexpected ')'")
        if tok != "(":
            return char(code(tok))
        head = toks[pos] if pos < len(toks) else None
        pos += 1
        if head not in _SEXPR_KIND:
            raise RegexSyntaxError(f"unknown head {head!r}")
        kind = _SEXPR_KIND[head]
        imm = 0
        if kind is Kind.DERIV:
            imm = code(toks[pos])
            pos += 1
        kids = [go() for _ in range(ARITY[kind])]
        if pos >= len(toks) or toks[pos] != ")":
            raise RegexSyntaxError("expected ')'")
        pos += 1
        return Term(kind, imm, *kids)

    t = go()
    if pos != len(toks):
        raise RegexSyntaxError("trailing input")
    return t


# ------------------------------------------------ epsilon and derivatives

@functools.lru_cache(maxsize=None)
def nullable(p: Term) -> bool:
    k = p.kind
    if k is Kind.BLANK or k is Kind.STAR:
        return True
    if k is Kind.UNION:
        return nullable(p.x) or nullable(p.y)
    if k is Kind.CONCAT:
        return nullable(p.x) and nullable(p.y)
    if k is Kind.EPS:
        return nullable(p.x)
    if k is Kind.DERIV:
        return nullable(reduce(p))
    return False


def epsilon_of(p: Term) -> Term:
    """``ε`` if ``p`` accepts the empty string, else ``∅``."""
    return BLANK if nullable(p) else EMPTY


def derive_char(c: int, p: Term) -> Term:
    """Fully unfolded derivative of the regular expression ``p`` by ``c``.

    No simplification happens here; the shapes follow the derivative rules
    one node at a time (``δc(pq) = δc(p)q | E(p)δc(q)`` and so on).
    """
    k = p.kind
    if k is Kind.EMPTY or k is Kind.BLANK:
        return EMPTY
    if k is Kind.CHAR:
        return BLANK if p.imm == c else EMPTY
    if k is Kind.UNION:
        return alt(derive_char(c, p.x), derive_char(c, p.y))
    if k is Kind.CONCAT:
        return alt(cat(derive_char(c, p.x), p.y),
                   cat(epsilon_of(p.x), derive_char(c, p.y)))
    if k is Kind.STAR:
        return cat(derive_char(c, p.x), p)
    raise ValueError("derive_char expects a regular expression")


@functools.lru_cache(maxsize=1 << 16)
def reduce(p: Term) -> Term:
    """Unfold every epsilon and derivative node, innermost first."""
    if p.regex:
        return p
    k = p.kind
    if k is Kind.EPS:
        return epsilon_of(reduce(p.x))
    if k is Kind.DERIV:
        return derive_char(p.imm, reduce(p.x))
    return Term(k, p.imm, *(reduce(c) for c in p.children))


def derive_string(s: Iterable[int], p: Term) -> Term:
    for c in s:
        p = normalize(derive_char(c, p))
    return p


def matches(p: Term, s: Sequence[int]) -> bool:
    """Membership by repeated derivation; ``p`` must be a regular expression."""
    return nullable(derive_string(s, p))


# ---------------------------------------------------------- total order

def term_compare(p: Term, q: Term) -> int:
    """Structural total order: kind rank, then character, then children."""
    while p is not q:
        if p.kind != q.kind:
            return -1 if p.kind < q.kind else 1
        if p.imm != q.imm:
            return -1 if p.imm < q.imm else 1
        if p.x is None:
            return 0
        if p.y is None:
            p, q = p.x, q.x
            continue
        r = term_compare(p.x, q.x)
        if r:
            return r
        p, q = p.y, q.y
    return 0


_sort_key = functools.cmp_to_key(term_compare)


# --------------------------------------------------------- normal forms

def union_members(p: Term) -> list:
    out = []
    while p.kind is Kind.UNION:
        out.append(p.x)
        p = p.y
    out.append(p)
    return out


def concat_factors(p: Term) -> list:
    out = []
    while p.kind is Kind.CONCAT:
        out.append(p.x)
        p = p.y
    out.append(p)
    return out


def right_nest(kind: Kind, items: Sequence[Term]) -> Term:
    t = items[-1]
    for item in reversed(items[:-1]):
        t = Term(kind, 0, item, t)
    return t


@functools.lru_cache(maxsize=1 << 16)
def normalize(p: Term) -> Term:
    """Canonical representative of ``p``'s similarity class.

    Unions are flattened, stripped of ``∅``, sorted by :func:`term_compare`,
    deduplicated and right-nested.  Concatenations are flattened, stripped
    of ``ε``, collapsed to ``∅`` if any factor is ``∅`` and right-nested.
    Stars are normalized underneath.  No star or distribution laws apply.
    """
    k = p.kind
    if k is Kind.STAR:
        return star(normalize(p.x))
    if k is Kind.UNION:
        members = set()
        for m in union_members(p):
            members.update(union_members(normalize(m)))
        members.discard(EMPTY)
        if not members:
            return EMPTY
        return right_nest(Kind.UNION, sorted(members, key=_sort_key))
    if k is Kind.CONCAT:
        factors = []
        for f in concat_factors(p):
            nf = normalize(f)
            if nf is EMPTY:
                return EMPTY
            if nf is not BLANK:
                factors.extend(concat_factors(nf))
        if not factors:
            return BLANK
        return right_nest(Kind.CONCAT, factors)
    if k is Kind.EPS or k is Kind.DERIV:
        raise ValueError("normalize expects a regular expression")
    return p


def is_normal(p: Term) -> bool:
    """Direct check of the normal-form conditions, independent of normalize."""
    k = p.kind
    if k in (Kind.EMPTY, Kind.BLANK, Kind.CHAR):
        return True
    if k is Kind.STAR:
        return is_normal(p.x)
    if k is Kind.CONCAT:
        return (is_normal(p.x) and is_normal(p.y) and p.x.kind is not Kind.CONCAT
                and p.x not in (EMPTY, BLANK) and p.y not in (EMPTY, BLANK))
    if k is Kind.UNION:
        a, q = p.x, p.y
        nxt = q.x if q.kind is Kind.UNION else q
        return (is_normal(a) and is_normal(q) and a.kind is not Kind.UNION
                and a is not EMPTY and nxt is not EMPTY and term_compare(a, nxt) < 0)
    return False


def deep_recursion(limit: int = 20000) -> None:
    """Raise the interpreter recursion limit for deeply nested terms."""
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)
