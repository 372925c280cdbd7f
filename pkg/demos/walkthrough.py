#!/usr/bin/env python3
"""From two regexes to validated proof tables, printing each stage."""

import sys

from rexproof.calculus import format_formula, step_count, walk
from rexproof.equivalence import equiv
from rexproof.mux import DEFAULT, FULL, NONE
from rexproof.proofgen import bookend, dedup_and_prune, proof_gen
from rexproof.tables import lower_proof
from rexproof.terms import Kind, deep_recursion, parse_regex, to_text
from rexproof.vm import validate


def main(left="(a*a)*", right="a*"):
    deep_recursion()
    al = sorted(set(left + right) - set("|*+?()"))
    n = len(al)
    p, q = parse_regex(left, al), parse_regex(right, al)
    print(f"alphabet {al}; comparing {to_text(p, al)} with {to_text(q, al)}")

    trace = []
    same = equiv(p, q, n, trace=trace)
    print(f"equivalent: {same} (search visited {len(trace)} derivative pairs)")
    if not same:
        return 1

    raw = proof_gen(p, q, n)
    root = bookend(dedup_and_prune(raw))
    print(f"proof: {step_count(raw)} raw steps, {step_count(root)} after sharing and bookends")
    for st in list(walk(root))[-8:]:
        print(f"  {st.rule.name:<15} {format_formula(st.conclusion, al)}")

    t = lower_proof(root, n, al, DEFAULT, seed=1)
    print("\nsize parameters:", t.size_params())
    names = {int(k): k.name.lower() for k in Kind}
    print("first term rows:")
    for i, (k, imm, x, y) in enumerate(t.terms[:8]):
        print(f"  t{i:<3} {names[k]:<7} imm={imm} x={x} y={y}")
    print("string rows:", t.strings)

    for mux in (DEFAULT, FULL, NONE):
        r = validate(t, mux)
        print(f"\n[{mux.mode}]")
        print(r.summary())
    return 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:3]))
