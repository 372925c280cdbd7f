"""Command-line entry point.

Exit codes: 0 equivalent / valid / success, 1 inequivalent / invalid,
2 usage or I/O error (including malformed input), 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .calculus import step_count
from .equivalence import DEFAULT_BUDGET, BudgetExceeded, equiv
from .mux import MuxConfig
from .mutation import run_mutations
from .proofgen import NotEquivalent, bookend, dedup_and_prune, proof_gen
from .tables import TableFormatError, load, lower_proof, serialize
from .terms import RegexSyntaxError, infer_alphabet, parse_regex
from .vm import validate
from .zksim import ZkBackend

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _alphabet(args, *texts):
    if args.alphabet:
        al = list(dict.fromkeys(args.alphabet))
    else:
        al = infer_alphabet(*texts)
    if not al:
        al = ["a"]
    if len(al) > 256:
        raise UsageError("at most 256 alphabet characters")
    return al


def _parse_pair(args):
    al = _alphabet(args, args.r1, args.r2)
    try:
        return parse_regex(args.r1, al), parse_regex(args.r2, al), al
    except RegexSyntaxError as e:
        raise UsageError(f"bad regex: {e}")


def cmd_equiv(args) -> int:
    p, q, al = _parse_pair(args)
    same = equiv(p, q, len(al), args.budget)
    print("equivalent" if same else "not equivalent")
    return EXIT_OK if same else EXIT_NO


def cmd_prove(args) -> int:
    p, q, al = _parse_pair(args)
    n = len(al)
    try:
        raw = proof_gen(p, q, n, args.budget)
    except NotEquivalent:
        print("not equivalent; no proof written")
        return EXIT_NO
    root = bookend(dedup_and_prune(raw))
    t = lower_proof(root, n, al, MuxConfig.of(args.mux), seed=args.seed)
    data = serialize(t)
    try:
        Path(args.output).write_bytes(data)
    except OSError as e:
        raise UsageError(f"cannot write {args.output}: {e}")
    print(f"proof written to {args.output}: {step_count(raw)} raw steps, "
          f"{t.pi} after dedup and bookends")
    print(" ".join(f"{k}={v}" for k, v in t.size_params().items()))
    return EXIT_OK


def _load(path):
    try:
        return load(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}")
    except TableFormatError as e:
        raise UsageError(f"malformed proof file {path}: {e}")


def cmd_validate(args) -> int:
    t = _load(args.file)
    mux = MuxConfig.of(args.mux) if args.mux else None
    backend = ZkBackend(args.seed) if (args.transcript or args.backend == "zk") else None
    report = validate(t, mux, backend, seed=args.seed)
    print(report.summary())
    if args.transcript:
        try:
            Path(args.transcript).write_text(report.transcript.export(), encoding="utf-8")
        except OSError as e:
            raise UsageError(f"cannot write {args.transcript}: {e}")
    return EXIT_OK if report.ok else EXIT_NO


def _read_pairs(directory: Path) -> list:
    files = sorted(p for p in directory.iterdir()
                   if p.is_file() and p.suffix in (".txt", ".tsv", ".pairs"))
    pairs = []
    for f in files:
        for no, line in enumerate(f.read_text(encoding="utf-8").splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split("\t") if "\t" in line else line.split()
            if len(parts) != 2:
                raise UsageError(f"{f.name}:{no}: expected two regexes")
            pairs.append((f"{f.name}:{no}", parts[0].strip(), parts[1].strip()))
    return pairs


BENCH_FIELDS = ["pair", "r1", "r2", "n", "equivalent", "equiv_s", "prove_s", "raw_steps",
                "steps", "lower_s", "validate_s", "valid", "status"]


def _bench_one(item, alphabet, budget, mux):
    name, r1, r2 = item
    row = dict.fromkeys(BENCH_FIELDS, "")
    row.update(pair=name, r1=r1, r2=r2)
    try:
        al = list(dict.fromkeys(alphabet)) if alphabet else (infer_alphabet(r1, r2) or ["a"])
        p, q = parse_regex(r1, al), parse_regex(r2, al)
        n = len(al)
        row["n"] = n
        t0 = time.perf_counter()
        same = equiv(p, q, n, budget)
        row["equiv_s"] = f"{time.perf_counter() - t0:.6f}"
        row["equivalent"] = int(same)
        if not same:
            row["status"] = "inequivalent"
            return row
        t0 = time.perf_counter()
        raw = proof_gen(p, q, n, budget)
        root = bookend(dedup_and_prune(raw))
        row["prove_s"] = f"{time.perf_counter() - t0:.6f}"
        row["raw_steps"] = step_count(raw)
        t0 = time.perf_counter()
        t = lower_proof(root, n, al, mux)
        row["lower_s"] = f"{time.perf_counter() - t0:.6f}"
        row["steps"] = t.pi
        t0 = time.perf_counter()
        ok = validate(t).ok
        row["validate_s"] = f"{time.perf_counter() - t0:.6f}"
        row["valid"] = int(ok)
        row["status"] = "ok" if ok else "invalid"
    except RegexSyntaxError as e:
        row["status"] = f"parse error: {e}"
    except BudgetExceeded:
        row["status"] = "budget"
    return row


def cmd_bench(args) -> int:
    d = Path(args.dir)
    if not d.is_dir():
        raise UsageError(f"{args.dir} is not a directory")
    pairs = _read_pairs(d)
    mux = MuxConfig.of(args.mux)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as ex:
        rows = list(ex.map(lambda it: _bench_one(it, args.alphabet, args.budget, mux), pairs))
    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=BENCH_FIELDS)
        w.writeheader()
        w.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    bad = [r for r in rows if r["status"] == "invalid"]
    print(f"# {len(rows)} pairs, {sum(r['equivalent'] == 1 for r in rows)} equivalent, "
          f"{len(bad)} invalid proofs", file=sys.stderr)
    return EXIT_NO if bad else EXIT_OK


def cmd_mutate(args) -> int:
    t = _load(args.file)
    if not validate(t, seed=args.seed):
        print("base proof does not validate; nothing to mutate")
        return EXIT_NO
    stats = run_mutations(t, args.trials, args.seed)
    print(f"trials: {stats.trials}")
    print(f"rejected: {stats.rejected} ({stats.rejection_rate:.1%})")
    print(f"accepted and re-checked sound: {stats.accepted_sound}")
    print(f"accepted but unsound: {len(stats.unsound)}")
    for where, why in stats.unsound[:10]:
        print(f"  {where}: {why}")
    return EXIT_NO if stats.unsound else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rexproof",
                                 description="Regex equivalence proofs and their validation.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def pair_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("r1")
        sp.add_argument("r2")
        sp.add_argument("--alphabet", help="alphabet characters, e.g. 'ab' (default: inferred)")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="maximum recursive calls")
        return sp

    pair_cmd("equiv", "decide whether two regexes match the same strings")
    sp = pair_cmd("prove", "write proof tables for an equivalent pair")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--mux", choices=("default", "none", "full"), default="default")
    sp.add_argument("--seed", type=int, default=0, help="row shuffle seed")

    sp = sub.add_parser("validate", help="validate a proof-tables file")
    sp.add_argument("file")
    sp.add_argument("--mux", choices=("default", "none", "full"))
    sp.add_argument("--seed", type=int, default=0, help="challenge seed")
    sp.add_argument("--backend", choices=("plain", "zk"), default="plain")
    sp.add_argument("--transcript", metavar="OUT",
                    help="run the committed backend and write its transcript")

    sp = sub.add_parser("bench", help="time the pipeline over a directory of pair files")
    sp.add_argument("dir")
    sp.add_argument("--alphabet")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("--mux", choices=("default", "none", "full"), default="default")
    sp.add_argument("-j", "--jobs", type=int, default=1)
    sp.add_argument("-o", "--output", help="CSV path (default: stdout)")

    sp = sub.add_parser("mutate", help="corrupt single cells and count rejections")
    sp.add_argument("file")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    return ap


COMMANDS = {"equiv": cmd_equiv, "prove": cmd_prove, "validate": cmd_validate,
            "bench": cmd_bench, "mutate": cmd_mutate}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.cmd](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except RecursionError:
        print("budget exceeded: recursion too deep", file=sys.stderr)
        return EXIT_BUDGET


def main(argv=None) -> int:
    # deep derivative searches recurse; give them a big stack
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 100000))
    threading.stack_size(512 * 1024 * 1024)
    result = []
    th = threading.Thread(target=lambda: result.append(run(argv)))
    th.start()
    th.join()
    code = result[0] if result else EXIT_USAGE
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
