"""Commitment backends that simulate the zero-knowledge execution discipline.

A backend hands out words and performs all arithmetic, comparisons and
memory reads on them.  :class:`ZkBackend` wraps every value in a
:class:`CommittedWord` whose value verifier-side code cannot read, and
records every operation (opcode plus table name, never a value) in a
:class:`Transcript`.  :class:`PlainBackend` works on bare integers and
records nothing.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

PRIME = (1 << 61) - 1
JOIN_SHIFT = 8


def join(position: int, code: int) -> int:
    """Pack a position and an 8-bit code into one integer."""
    if not (0 <= code < (1 << JOIN_SHIFT)):
        raise ValueError("code must fit in 8 bits")
    if not (0 <= position < (1 << 52)):
        raise ValueError("position must be below 2**52")
    return (position << JOIN_SHIFT) | code


def poly_eval(values: Iterable[int], r: int) -> int:
    acc = 1
    for v in values:
        acc = acc * ((r - v) % PRIME) % PRIME
    return acc


def multiset_eq(a: Sequence[int], b: Sequence[int], rng: random.Random) -> bool:
    """Polynomial identity test: compare prod(r - a_i) with prod(r - b_i).

    Never rejects a true permutation.  A false claim passes with
    probability at most ``len(a) / PRIME`` per challenge.
    """
    if len(a) != len(b):
        return False
    r = rng.randrange(PRIME)
    return poly_eval(a, r) == poly_eval(b, r)


# ------------------------------------------------------------ transcript

@dataclass
class Transcript:
    """Ordered, value-free operation records with per-opcode counters."""

    records: list = field(default_factory=list)
    counts: Counter = field(default_factory=Counter)

    def add(self, op: str, table: str = "") -> None:
        self.records.append((op, table))
        self.counts[op] += 1

    def export(self) -> str:
        lines = [f"{op} {table}".rstrip() for op, table in self.records]
        lines.append("# totals " + " ".join(f"{k}={v}" for k, v in sorted(self.counts.items())))
        return "\n".join(lines) + "\n"

    def __len__(self):
        return len(self.records)


def transcript_compare(t1: Transcript, t2: Transcript) -> bool:
    """Record-for-record equality."""
    return t1.records == t2.records


def first_difference(t1: Transcript, t2: Transcript) -> Optional[int]:
    for i, (a, b) in enumerate(zip(t1.records, t2.records)):
        if a != b:
            return i
    if len(t1.records) != len(t2.records):
        return min(len(t1.records), len(t2.records))
    return None


# --------------------------------------------------------------- backends

class CommittedWord:
    """A hidden value.  Only the owning backend can look inside."""

    __slots__ = ("_value", "handle")

    def __init__(self, value: int, handle: int):
        self._value = value
        self.handle = handle

    def __repr__(self):
        return f"<committed #{self.handle}>"

    def __eq__(self, other):
        raise TypeError("committed words cannot be compared directly; use backend.eq")

    __hash__ = None


class PlainBackend:
    """Integers in the clear; operations mirror :class:`ZkBackend`."""

    zk = False

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)
        self.invalid = False
        self.transcript = None

    def const(self, v: int) -> int:
        return v

    def fetch(self, name: str, table: Sequence, idx: int) -> tuple:
        if not 0 <= idx < len(table):
            self.invalid = True
            return tuple(0 for _ in table[0]) if table else ()
        return table[idx]

    def scan(self, name: str, row: tuple) -> tuple:
        return row

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def eq(self, a, b) -> int:
        return int(a == b)

    def lt(self, a, b) -> int:
        return int(a < b)

    def and_(self, a, b) -> int:
        return a & b

    def or_(self, a, b) -> int:
        return a | b

    def not_(self, a) -> int:
        return 1 - a

    def select(self, z, a, b):
        return a if z else b

    def join(self, pos, code):
        return pos * (1 << JOIN_SHIFT) + code

    def multiset_eq(self, a: Sequence[int], b: Sequence[int]) -> int:
        return int(multiset_eq(a, b, self.rng))

    def reveal(self, bit) -> bool:
        return bool(bit)

    def loop_iter(self, name: str) -> None:
        pass


class ZkBackend:
    """Committed words with a transcript of every operation.

    The verifier-role challenge generator is seeded for reproducibility;
    pass ``seed=None`` for fresh entropy.
    """

    zk = True

    def __init__(self, seed: Optional[int] = 0):
        self.rng = random.Random(seed) if seed is not None else random.SystemRandom()
        self.transcript = Transcript()
        self.invalid = False
        self._next = 0

    def _w(self, v: int) -> CommittedWord:
        self._next += 1
        return CommittedWord(v, self._next)

    @staticmethod
    def _v(x) -> int:
        return x._value if isinstance(x, CommittedWord) else x

    def commit(self, v: int) -> CommittedWord:
        self.transcript.add("commit")
        return self._w(v)

    def const(self, v: int) -> CommittedWord:
        return self._w(v)

    def commit_table(self, name: str, table: Sequence) -> list:
        rows = []
        for row in table:
            self.transcript.add("commit_row", name)
            rows.append(tuple(self._w(v) for v in row))
        return rows

    def fetch(self, name: str, table: Sequence, idx) -> tuple:
        """Oblivious read: one record regardless of the hidden index."""
        self.transcript.add("fetch", name)
        i = self._v(idx)
        if not 0 <= i < len(table):
            self.invalid = True
            i = 0
        return table[i]

    def scan(self, name: str, row: tuple) -> tuple:
        """Public sequential read of the next row."""
        self.transcript.add("scan", name)
        return row

    def _bin(self, op, a, b, v):
        self.transcript.add(op)
        return self._w(v)

    def add(self, a, b):
        return self._bin("add", a, b, (self._v(a) + self._v(b)))

    def sub(self, a, b):
        return self._bin("sub", a, b, (self._v(a) - self._v(b)))

    def mul(self, a, b):
        return self._bin("mul", a, b, (self._v(a) * self._v(b)))

    def eq(self, a, b):
        return self._bin("eq", a, b, int(self._v(a) == self._v(b)))

    def lt(self, a, b):
        return self._bin("lt", a, b, int(self._v(a) < self._v(b)))

    def and_(self, a, b):
        return self._bin("and", a, b, self._v(a) & self._v(b))

    def or_(self, a, b):
        return self._bin("or", a, b, self._v(a) | self._v(b))

    def not_(self, a):
        self.transcript.add("not")
        return self._w(1 - self._v(a))

    def select(self, z, a, b):
        self.transcript.add("select")
        return self._w(self._v(a) if self._v(z) else self._v(b))

    def join(self, pos, code):
        self.transcript.add("join")
        return self._w(self._v(pos) * (1 << JOIN_SHIFT) + self._v(code))

    def multiset_eq(self, a: Sequence, b: Sequence):
        self.transcript.add(f"mset[{len(a)}x{len(b)}]")
        return self._w(int(multiset_eq([self._v(x) for x in a],
                                       [self._v(x) for x in b], self.rng)))

    def reveal(self, bit) -> bool:
        self.transcript.add("reveal")
        return bool(self._v(bit))

    def loop_iter(self, name: str) -> None:
        self.transcript.add("iter", name)
