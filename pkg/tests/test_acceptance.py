"""Acceptance criteria, one test each.

Every test records a single PASS/FAIL line (shown in the terminal summary)
and asserts the pinned tolerance.  Thresholds live in the constants below.
"""

import random
import time

import pytest

from conftest import ACCEPTANCE_LINES
from gen import perturbed_pairs, random_pairs
from oracles import dfa_equivalent, naive_append, naive_reverse
from rexproof.calculus import BOTTOM, Eq, Neq, ProofStep, RuleId, Sync, step_count
from rexproof.equivalence import equiv
from rexproof.mutation import run_mutations
from rexproof.mux import DEFAULT, FULL, NONE
from rexproof.proofgen import bookend, dedup_and_prune, proof_gen, prove, refl
from rexproof.tables import (PadSpec, ProofTables, TableBuilder, deserialize, lower_proof,
                             serialize)
from rexproof.terms import EMPTY, Kind, char, der, parse_regex, star
from rexproof.vm import check_reverse, sync_extend_scan, validate
from rexproof.zksim import ZkBackend, first_difference, transcript_compare

MODES = (DEFAULT, FULL, NONE)
AB = ["a", "b"]

# pinned tolerances
C1_MAX_SECONDS = 1.0
C2_RANDOM_PAIRS = 2000
C2_PERTURBED_PAIRS = 200
C2_MAX_DISAGREEMENTS = 0
C2_MAX_SECONDS = 60.0
C3_MAX_FAILURES = 0
C3_MAX_SECONDS = 300.0
C4_ADVERSARIAL_REJECTIONS = 6
C4_MUTANTS = 1000
C4_MAX_UNSOUND = 0
C5_INSTANCES = 10_000
C5_NU = 16
C5_MAX_DISAGREEMENTS = 0
C6_MIN_PAIRS = 20
C7_MAX_STEPS = 5000
C7_MAX_SECONDS_PER_PROOF = 0.1
C8_MIN_SHRINK_FRACTION = 0.5
C8_RAW_STEP_FLOOR = 100


def record(num, title, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {title} :: {detail}")
    print(ACCEPTANCE_LINES[-1])


@pytest.fixture(scope="module")
def corpus():
    """Criterion 2's pairs and verdicts, shared with the later criteria."""
    pairs = random_pairs(2024, C2_RANDOM_PAIRS) + perturbed_pairs(2025, C2_PERTURBED_PAIRS)
    t0 = time.perf_counter()
    verdicts = [equiv(p, q, 2) for p, q in pairs]
    equiv_s = time.perf_counter() - t0
    return {"pairs": pairs, "verdicts": verdicts, "equiv_s": equiv_s, "proofs": {}}


def _proofs(corpus):
    """Raw and final proofs of every equivalent pair, computed once."""
    if not corpus["proofs"]:
        for i, ((p, q), same) in enumerate(zip(corpus["pairs"], corpus["verdicts"])):
            if same:
                raw = proof_gen(p, q, 2)
                corpus["proofs"][i] = (raw, bookend(dedup_and_prune(raw)))
    return corpus["proofs"]


def test_c1_worked_example():
    t0 = time.perf_counter()
    al = ["a"]
    p, q = parse_regex("(a*a)*", al), parse_regex("a*", al)
    same = equiv(p, q, 1)
    root = bookend(dedup_and_prune(proof_gen(p, q, 1)))
    ok_modes = {m.mode: validate(lower_proof(root, 1, al, m)).ok for m in MODES}
    dt = time.perf_counter() - t0
    ok = same and all(ok_modes.values()) and dt < C1_MAX_SECONDS
    record(1, "worked example end-to-end", ok,
           f"equiv={same} modes={ok_modes} steps={step_count(root)} time={dt:.3f}s "
           f"(limit {C1_MAX_SECONDS}s)")
    assert ok


def test_c2_oracle_agreement(corpus):
    t0 = time.perf_counter()
    wrong = [i for i, ((p, q), v) in enumerate(zip(corpus["pairs"], corpus["verdicts"]))
             if dfa_equivalent(p, q, 2) != v]
    oracle_s = time.perf_counter() - t0
    total = len(corpus["pairs"])
    n_eq = sum(corpus["verdicts"])
    perturbed_ok = all(corpus["verdicts"][C2_RANDOM_PAIRS:])
    ok = (len(wrong) <= C2_MAX_DISAGREEMENTS and corpus["equiv_s"] < C2_MAX_SECONDS
          and total >= C2_RANDOM_PAIRS + C2_PERTURBED_PAIRS and perturbed_ok)
    record(2, "equiv agrees with automaton oracle", ok,
           f"pairs={total} equivalent={n_eq} disagreements={len(wrong)} "
           f"equiv={corpus['equiv_s']:.2f}s oracle={oracle_s:.2f}s (limit {C2_MAX_SECONDS}s)")
    assert ok


def test_c3_round_trip(corpus):
    t0 = time.perf_counter()
    proofs = _proofs(corpus)
    failures = []
    for i, (_, root) in proofs.items():
        t = deserialize(serialize(lower_proof(root, 2, AB, DEFAULT, seed=i)))
        r = validate(t)
        if not r.ok:
            failures.append((i, r.phase, r.message))
    dt = time.perf_counter() - t0
    ok = len(failures) <= C3_MAX_FAILURES and dt < C3_MAX_SECONDS and proofs
    record(3, "generate, dedup, bookend, lower, validate", ok,
           f"proofs={len(proofs)} failures={len(failures)} time={dt:.2f}s "
           f"(limit {C3_MAX_SECONDS}s)")
    assert ok, failures[:3]


# ---------------------------------------------------------------- criterion 4

def _worked_tables(mux):
    al = ["a"]
    root = prove(parse_regex("(a*a)*", al), parse_regex("a*", al), 1)
    return lower_proof(root, 1, al, mux, seed=11)


def _adv_empty_sync_cycle(mux):
    a, b = char(0), char(1)
    hyp = ProofStep(RuleId.Assume, (), Neq(a, b))
    cyc = ProofStep(RuleId.SyncCycle, (refl(a), refl(b)), Sync((), a, b))
    lie = ProofStep(RuleId.SyncEmpty, (cyc,), Eq(a, b))
    return lower_proof(ProofStep(RuleId.Contra, (hyp, lie), BOTTOM), 2, AB, mux)


def _adv_eq_assume(mux):
    a, b = char(0), char(1)
    hyp = ProofStep(RuleId.Assume, (), Eq(a, b))
    return lower_proof(ProofStep(RuleId.Contra, (hyp, hyp), BOTTOM), 2, AB, mux)


def _adv_cyclic_premise(mux):
    t = _worked_tables(mux)
    contra = max(range(t.pi), key=lambda i: t.steps[i][0])
    victim = next(i for i, r in enumerate(t.steps) if r[1] == RuleId.Trans)
    row = list(t.steps[victim])
    row[4] = contra
    t.steps[victim] = tuple(row)
    return t


def _adv_duplicate_id(mux):
    t = _worked_tables(mux)
    row = list(t.steps[1])
    row[0] = t.steps[2][0]
    t.steps[1] = tuple(row)
    return t


def _adv_short_chain(mux):
    t = _worked_tables(mux)
    pos = next(i for i, r in enumerate(t.steps) if r[1] == RuleId.SyncCycle)
    res = t.steps[pos][3]
    kind, k, s, a, b = t.formulas[res]
    # string "a" becomes "aa"; the premise chains stay one derivative long
    t.strings = list(t.strings) + [(0, s, t.strings[s][2] + 1)]
    t.nu = max(t.nu, t.strings[s][2] + 1)
    t.formulas[res] = (kind, k, len(t.strings) - 1, a, b)
    return t


def _adv_out_of_alphabet(mux):
    t = _worked_tables(mux)
    i = next(i for i, r in enumerate(t.terms) if r[0] == Kind.CHAR)
    t.terms[i] = (int(Kind.CHAR), t.n, 0, 0)
    return t


ADVERSARIAL = {
    "empty-string SyncCycle": _adv_empty_sync_cycle,
    "Eq-concluding Assume": _adv_eq_assume,
    "cyclic premise": _adv_cyclic_premise,
    "duplicated stepId": _adv_duplicate_id,
    "chain shorter than Sync string": _adv_short_chain,
    "character code >= n": _adv_out_of_alphabet,
}


def test_c4_adversarial_and_mutants():
    rejected = 0
    notes = []
    for name, build in ADVERSARIAL.items():
        every = True
        for mux in MODES:
            t = build(mux)
            plain, zk = validate(t), validate(t, backend=ZkBackend(7))
            every &= not plain.ok and not zk.ok
            notes.append(f"{name}/{mux.mode}:{plain.phase}")
        rejected += every
    al = ["a", "b"]
    base = lower_proof(prove(parse_regex("a(ba)*", al), parse_regex("(ab)*a", al), 2),
                       2, al, DEFAULT, seed=4)
    assert validate(base).ok
    stats = run_mutations(base, C4_MUTANTS, seed=2024)
    ok = rejected == C4_ADVERSARIAL_REJECTIONS and len(stats.unsound) <= C4_MAX_UNSOUND
    record(4, "adversarial suite and random mutants", ok,
           f"adversarial rejected={rejected}/{len(ADVERSARIAL)} in all modes; "
           f"mutants={stats.trials} rejected={stats.rejected} "
           f"accepted-and-sound={stats.accepted_sound} unsound={len(stats.unsound)}")
    assert ok, (notes, stats.unsound[:3])


# ---------------------------------------------------------------- criterion 5

def _scan_instance(rng):
    n = rng.randint(1, 4)
    s = tuple(rng.randrange(n) for _ in range(rng.randint(0, C5_NU)))
    chain_chars = list(s)
    roll = rng.random()
    if chain_chars and roll < 0.15:
        chain_chars[rng.randrange(len(chain_chars))] = rng.randrange(n)
    elif chain_chars and roll < 0.25:
        chain_chars.pop()
    elif roll < 0.35 and len(chain_chars) < C5_NU:
        chain_chars.append(rng.randrange(n))
    elif roll < 0.45:
        chain_chars.reverse()
    base = star(char(0)) if rng.random() < 0.5 else EMPTY
    chain = base
    for c in chain_chars:
        chain = der(c, chain)
    c = rng.randrange(n)
    sc = list(s) + [c]
    if rng.random() < 0.3 and len(sc) > 0:
        sc[rng.randrange(len(sc))] = rng.randrange(n)
    if rng.random() < 0.1 and len(sc) > 1:
        sc.pop(0)
    b = TableBuilder()
    ci = b.term(chain)
    bi = b.term(base)
    si = b.string(s)
    sci = b.string(tuple(sc)[:C5_NU])
    t = ProofTables(n, C5_NU, b.terms, b.strings, [], [])
    return t, ci, bi, si, sci, c


def test_c5_scan_oracles():
    rng = random.Random(5)
    bad_rev = bad_ext = bad_iter = 0
    positives = [0, 0]
    for _ in range(C5_INSTANCES):
        t, ci, bi, si, sci, c = _scan_instance(rng)
        base = bi if rng.random() < 0.5 else None
        zk = ZkBackend(rng.randrange(1 << 30))
        got = check_reverse(t, ci, si, base, backend=zk)
        want = naive_reverse(t.terms, t.strings, ci, si, base)
        bad_rev += got != want
        positives[0] += want
        bad_iter += zk.transcript.records.count(("iter", "rev")) != C5_NU
        zk = ZkBackend(rng.randrange(1 << 30))
        got = sync_extend_scan(t, sci, si, c, backend=zk)
        want = naive_append(t.strings, sci, si, c)
        bad_ext += got != want
        positives[1] += want
        bad_iter += zk.transcript.records.count(("iter", "ext")) != C5_NU
    ok = max(bad_rev, bad_ext, bad_iter) <= C5_MAX_DISAGREEMENTS
    record(5, "checkReverse / syncExtendScan vs naive oracles", ok,
           f"instances={C5_INSTANCES} each; disagreements rev={bad_rev} ext={bad_ext}; "
           f"true cases rev={positives[0]} ext={positives[1]}; "
           f"transcripts with iterations != nu={bad_iter}")
    assert ok


# ---------------------------------------------------------------- criterion 6

def _transcript(t, seed=99):
    return validate(t, backend=ZkBackend(seed))


def test_c6_trace_constancy(corpus):
    proofs = _proofs(corpus)
    roots = [root for _, (_, root) in sorted(proofs.items()) if step_count(root) > 3]
    rng = random.Random(6)
    rng.shuffle(roots)
    pairs = list(zip(roots[0::2], roots[1::2]))[:C6_MIN_PAIRS]
    full_identical = default_identical = 0
    for r1, r2 in pairs:
        for mux in (FULL, DEFAULT):
            a, b = lower_proof(r1, 2, AB, mux), lower_proof(r2, 2, AB, mux)
            spec = PadSpec.matching(a, b)
            a, b = lower_proof(r1, 2, AB, mux, pad=spec), lower_proof(r2, 2, AB, mux, pad=spec)
            assert a.size_params() == b.size_params()
            assert a.category_counts() == b.category_counts()
            ra, rb = _transcript(a), _transcript(b)
            assert ra.ok and rb.ok
            same = transcript_compare(ra.transcript, rb.transcript)
            if mux is FULL:
                full_identical += same
            else:
                default_identical += same
    # Default mux with equal sizes but shifted category counts: transcripts may
    # only diverge from the first category whose count differs
    split_ok = 0
    for r1, r2 in pairs:
        a, b = lower_proof(r1, 2, AB, DEFAULT), lower_proof(r2, 2, AB, DEFAULT)
        base = PadSpec.matching(a, b)
        c1 = dict(base.counts)
        c2 = dict(base.counts)
        c1[1] += 2
        c2[2] += 2
        a = lower_proof(r1, 2, AB, DEFAULT, pad=PadSpec(base.chi, base.xi, base.nu, c1))
        b = lower_proof(r2, 2, AB, DEFAULT, pad=PadSpec(base.chi, base.xi, base.nu, c2))
        ta, tb = _transcript(a).transcript, _transcript(b).transcript
        scans = [i for i, rec in enumerate(ta.records) if rec == ("scan", "Mp")]
        boundary = scans[c1[0]]                 # category 1 is the first to differ
        d = first_difference(ta, tb)
        split_ok += d is not None and d >= boundary
    ok = (len(pairs) >= C6_MIN_PAIRS and full_identical == len(pairs)
          and default_identical == len(pairs) and split_ok == len(pairs))
    record(6, "trace constancy", ok,
           f"pairs={len(pairs)} full-identical={full_identical} "
           f"default-identical={default_identical} "
           f"default-split-after-equal-prefix={split_ok}")
    assert ok


# ---------------------------------------------------------------- criterion 7

def test_c7_plain_validation_speed(corpus):
    proofs = _proofs(corpus)
    roots = [root for _, root in proofs.values()]
    al4 = ["a", "b", "c", "d"]
    big = [("(a|b|c|d)*", "(a*b*c*d*)*"), ("((a|b)(c|d))*((a|b)(c|d))",
                                             "((a|b)(c|d))((a|b)(c|d))*")]
    tables = [lower_proof(r, 2, AB) for r in roots]
    tables += [lower_proof(prove(parse_regex(x, al4), parse_regex(y, al4), 4), 4, al4)
               for x, y in big]
    worst = 0.0
    worst_steps = 0
    counted = 0
    total_steps = 0
    for t in tables:
        if t.pi > C7_MAX_STEPS:
            continue
        t0 = time.perf_counter()
        r = validate(t)
        dt = time.perf_counter() - t0
        assert r.ok
        counted += 1
        total_steps += t.pi
        if dt > worst:
            worst, worst_steps = dt, t.pi
    ok = counted > 0 and worst < C7_MAX_SECONDS_PER_PROOF
    record(7, "plain validation time", ok,
           f"proofs={counted} mean steps={total_steps / counted:.0f} "
           f"slowest={worst * 1000:.2f}ms at {worst_steps} steps "
           f"(limit {C7_MAX_SECONDS_PER_PROOF * 1000:.0f}ms)")
    assert ok


# ---------------------------------------------------------------- criterion 8

def test_c8_dedup_effectiveness(corpus):
    proofs = _proofs(corpus)
    grew = 0
    big = shrunk = 0
    for raw, root in proofs.values():
        before = step_count(raw)
        after = step_count(root) - 2          # minus Assume and Contra
        grew += after > before
        if before >= C8_RAW_STEP_FLOOR:
            big += 1
            shrunk += after < before
    frac = shrunk / big if big else 0.0
    ok = grew == 0 and big > 0 and frac >= C8_MIN_SHRINK_FRACTION
    record(8, "dedup effectiveness", ok,
           f"proofs={len(proofs)} grew={grew} with>={C8_RAW_STEP_FLOOR} raw steps={big} "
           f"strictly smaller={shrunk} ({frac:.0%}, floor {C8_MIN_SHRINK_FRACTION:.0%})")
    assert ok
