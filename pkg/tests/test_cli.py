import csv
import io
import subprocess
import sys

import pytest

from rexproof.cli import main


def run(*argv):
    return main(list(argv))


def test_equiv_exit_codes(capsys):
    assert run("equiv", "(a*a)*", "a*") == 0
    assert "equivalent" in capsys.readouterr().out
    assert run("equiv", "a", "b") == 1
    assert run("equiv", "a(", "b") == 2
    assert run("equiv", "a", "c", "--alphabet", "ab") == 2
    assert run("equiv", "(a|b)*", "(a*b*)*", "--budget", "2") == 3


def test_prove_then_validate(tmp_path, capsys):
    out = tmp_path / "p.tables"
    assert run("prove", "(a*a)*", "a*", "-o", str(out)) == 0
    assert run("validate", str(out)) == 0
    text = capsys.readouterr().out
    assert "verdict: VALID" in text and "steps per category" in text and "pi=" in text
    for mux in ("default", "none", "full"):
        assert run("validate", str(out), "--mux", mux) == 0
    assert run("validate", str(out), "--backend", "zk") == 0


def test_prove_inequivalent(tmp_path):
    out = tmp_path / "p.tables"
    assert run("prove", "a*", "(aa)*", "-o", str(out)) == 1
    assert not out.exists()


def test_validate_malformed_and_missing(tmp_path):
    junk = tmp_path / "garbage.bin"
    junk.write_bytes(bytes(range(256)))
    assert run("validate", str(junk)) == 2
    assert run("validate", str(tmp_path / "nope")) == 2
    assert run("validate") == 2
    assert run("frobnicate") == 2


def test_invalid_proof_exit_code(tmp_path):
    out = tmp_path / "p.tables"
    assert run("prove", "a(ba)*", "(ab)*a", "-o", str(out)) == 0
    lines = out.read_text().splitlines()
    # swap two step ids: loadable, but the logical order breaks
    idx = [i for i, l in enumerate(lines) if l.startswith("p ")]
    a, b = lines[idx[0]].split(), lines[idx[1]].split()
    a[1], b[1] = b[1], a[1]
    a[2] = str((int(a[2]) + 1) % 45)
    lines[idx[0]], lines[idx[1]] = " ".join(a), " ".join(b)
    out.write_text("\n".join(lines) + "\n")
    assert run("validate", str(out)) == 1


def test_transcripts_are_byte_identical(tmp_path):
    p = tmp_path / "p.tables"
    assert run("prove", "(a|b)*", "(a*b*)*", "-o", str(p)) == 0
    t1, t2 = tmp_path / "t1", tmp_path / "t2"
    assert run("validate", str(p), "--mux", "full", "--seed", "5", "--transcript", str(t1)) == 0
    assert run("validate", str(p), "--mux", "full", "--seed", "5", "--transcript", str(t2)) == 0
    assert t1.read_bytes() == t2.read_bytes()
    assert "# totals" in t1.read_text()


def test_prove_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run("prove", "(a|b)*", "(a*b*)*", "-o", str(a), "--seed", "9")
    run("prove", "(a|b)*", "(a*b*)*", "-o", str(b), "--seed", "9")
    assert a.read_bytes() == b.read_bytes()


def test_bench(tmp_path, capsys):
    d = tmp_path / "corpus"
    d.mkdir()
    (d / "pairs.txt").write_text("# comment\n(a*a)*\ta*\na(ba)* (ab)*a\na b\n")
    csv_path = tmp_path / "out.csv"
    assert run("bench", str(d), "-j", "2", "-o", str(csv_path)) == 0
    rows = list(csv.DictReader(io.StringIO(csv_path.read_text())))
    assert [r["status"] for r in rows] == ["ok", "ok", "inequivalent"]
    assert all(float(r["validate_s"]) >= 0 for r in rows[:2])
    assert run("bench", str(tmp_path / "missing")) == 2
    (d / "bad.txt").write_text("only-one\n")
    assert run("bench", str(d)) == 2


def test_mutate(tmp_path, capsys):
    p = tmp_path / "p.tables"
    run("prove", "(a*a)*", "a*", "-o", str(p))
    capsys.readouterr()
    assert run("mutate", str(p), "--trials", "50", "--seed", "3") == 0
    out = capsys.readouterr().out
    assert "trials: 50" in out and "accepted but unsound: 0" in out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "rexproof", "equiv", "(a*a)*", "a*"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "equivalent" in r.stdout
