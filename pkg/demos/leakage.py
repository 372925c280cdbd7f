#!/usr/bin/env python3
"""Two unrelated proofs, padded to the same public sizes, leave the same trace."""

from rexproof.mux import FULL
from rexproof.proofgen import prove
from rexproof.tables import PadSpec, lower_proof
from rexproof.terms import deep_recursion, parse_regex
from rexproof.vm import validate
from rexproof.zksim import ZkBackend, first_difference, transcript_compare

AL = ["a", "b"]
PAIRS = [("(a|b)*", "(a*b*)*"), ("a(ba)*", "(ab)*a")]


def lowered(pad=None):
    out = []
    for left, right in PAIRS:
        root = prove(parse_regex(left, AL), parse_regex(right, AL), 2)
        out.append(lower_proof(root, 2, AL, FULL, seed=3, pad=pad))
    return out


def show(label, tables):
    reports = [validate(t, backend=ZkBackend(42)) for t in tables]
    for (left, right), t, r in zip(PAIRS, tables, reports):
        print(f"  {left} = {right}: {t.size_params()} counts={t.category_counts()} "
              f"valid={r.ok} records={len(r.transcript)}")
    same = transcript_compare(reports[0].transcript, reports[1].transcript)
    where = first_difference(reports[0].transcript, reports[1].transcript)
    print(f"{label}: transcripts identical={same}" + ("" if same else f", first gap at {where}"))


if __name__ == "__main__":
    deep_recursion()
    bare = lowered()
    show("unpadded", bare)
    show("padded to common sizes", lowered(PadSpec.matching(*bare)))
