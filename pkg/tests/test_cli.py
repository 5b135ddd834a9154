import subprocess
import sys
from pathlib import Path

import pytest

from kpa.arrayfile import read_array
from kpa.cli import main
from kpa.verify import certify

GOLDEN = Path(__file__).parent / "golden" / "p6d3.txt"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_golden(capsys):
    code, out, _ = run(capsys, "verify", str(GOLDEN), "--d", "3")
    assert code == 0 and "102" in out
    code, out, _ = run(capsys, "verify", str(GOLDEN), "--d", "4")
    assert code == 2


def test_dist(capsys):
    assert run(capsys, "dist", "0 2 1", "0 1 2")[:2] == (0, "1\n")
    assert run(capsys, "dist", "3 2 1", "1 2 3", "--one-based")[1] == "3\n"
    assert run(capsys, "dist", "0 1", "0 1 2")[0] == 1


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["search", "--n", "5"])
    assert exc.value.code == 1
    assert run(capsys, "verify", "/nonexistent/file.txt")[0] == 1


def test_expand_matches_golden(tmp_path, capsys):
    out = tmp_path / "e.txt"
    assert run(capsys, "expand", "--shipped", "p6d3", "--out", str(out))[0] == 0
    assert read_array(out).as_set() == read_array(GOLDEN).as_set()


def test_search_is_byte_identical(capsys, monkeypatch):
    monkeypatch.delenv("KPA_THREADS", raising=False)
    argv = ["search", "--n", "6", "--d", "5", "--restarts", "3", "--rng", "4"]
    first = run(capsys, *argv)
    assert run(capsys, *argv) == first
    assert "# rng=PCG64(4)" in first[1]
    threaded = run(capsys, "--threads", "2", *argv)
    body = [line for line in first[1].splitlines() if not line.startswith("# command=")]
    assert [line for line in threaded[1].splitlines() if not line.startswith("# command=")] == body


def test_search_restricted(tmp_path, capsys):
    out = tmp_path / "s.txt"
    code, _, _ = run(capsys, "search", "--space", "s-nm", "--n", "8", "--m", "2", "--d", "6",
                     "--restarts", "5", "--out", str(out))
    assert code == 0
    a = read_array(out)
    assert a.restriction_m == 2 and certify(a, 6).passed and len(a) >= 5


def test_clique(capsys):
    code, out, _ = run(capsys, "clique", "--n", "4", "--d", "3")
    assert code == 0 and "# size=5" in out
    assert run(capsys, "clique", "--n", "8", "--d", "3")[0] == 1


def test_construct_chain(tmp_path, capsys):
    base = tmp_path / "p.txt"
    assert run(capsys, "construct", "--rule", "pattern-d3", "--n", "7", "--out", str(base))[0] == 0
    assert len(read_array(base)) == 9
    code, out, _ = run(capsys, "construct", "--rule", "insert", "--in", str(base))
    assert code == 0 and "# size=27" in out
    assert run(capsys, "construct", "--rule", "halve", "--in", str(base))[0] == 0
    assert run(capsys, "construct", "--rule", "pattern-d4", "--n", "8")[0] == 1


def test_bounds_show_and_trace(capsys):
    code, out, _ = run(capsys, "bounds", "show", "--rows", "14:14", "--cols", "11:12", "--csv")
    assert code == 0 and out.strip().splitlines()[-1] == "14,141782,100813"
    code, out, _ = run(capsys, "bounds", "show", "--trace", "P(16,15)")
    assert code == 0 and "FLAG" in out


def test_bounds_derive(tmp_path, capsys):
    out = tmp_path / "db.jsonl"
    code, text, _ = run(capsys, "bounds", "derive", "--window", "n=4:17,d=1:15,m=4", "--out", str(out))
    assert code == 0 and "51,046" in text
    assert out.read_text().count("\n") > 100


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "kpa.cli", "dist", "1 0", "0 1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1\n"
