#!/usr/bin/env python3
"""Corrupt a valid proof in a few classic ways and watch the validator object."""

from rexproof.mux import DEFAULT
from rexproof.mutation import run_mutations
from rexproof.proofgen import prove
from rexproof.tables import lower_proof
from rexproof.terms import Kind, deep_recursion, parse_regex
from rexproof.vm import validate


def fresh():
    al = ["a"]
    root = prove(parse_regex("(a*a)*", al), parse_regex("a*", al), 1)
    return lower_proof(root, 1, al, DEFAULT, seed=5)


def swap_ids(t):
    a, b = list(t.steps[0]), list(t.steps[1])
    a[0], b[0] = b[0], a[0]
    t.steps[0], t.steps[1] = tuple(a), tuple(b)


def repeat_id(t):
    row = list(t.steps[2])
    row[0] = t.steps[3][0]
    t.steps[2] = tuple(row)


def foreign_char(t):
    i = next(i for i, r in enumerate(t.terms) if r[0] == Kind.CHAR)
    t.terms[i] = (int(Kind.CHAR), 7, 0, 0)


def flip_conclusion(t):
    kind, k, s, a, b = t.formulas[0]
    t.formulas[0] = (kind, k, s, b, a)


if __name__ == "__main__":
    deep_recursion()
    print("untouched:", validate(fresh()).ok)
    for edit in (swap_ids, repeat_id, foreign_char, flip_conclusion):
        t = fresh()
        edit(t)
        r = validate(t)
        print(f"{edit.__name__:<16} valid={r.ok} phase={r.phase or '-'} {r.message}")
    stats = run_mutations(fresh(), 300, seed=1)
    print(f"\n300 random one-cell edits: {stats.rejected} rejected, "
          f"{stats.accepted_sound} accepted and still sound, {len(stats.unsound)} unsound")
