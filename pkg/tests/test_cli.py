import json
import shutil
import subprocess

import pytest

from popmatch.cli import main
from popmatch.core import parse_instance, parse_matching

I2X2 = """popmatch-instance v1
A: a1 a2
B: b1 b2
pref a1: b1
pref a2: b1 b2
pref b1: a2 a1
pref b2: a2
"""


@pytest.fixture
def files(tmp_path):
    (tmp_path / "i2x2.txt").write_text(I2X2)
    (tmp_path / "s.txt").write_text("a2 b1\n")
    (tmp_path / "d.txt").write_text("a1 b1\na2 b2\n")
    (tmp_path / "bad.txt").write_text("a1 b1\n")
    (tmp_path / "w.txt").write_text("a1 b1 3\na2 b1 1\na2 b2 1\n")
    (tmp_path / "nw.txt").write_text("a1 1\n")
    (tmp_path / "unsat.cnf").write_text("p cnf 1 2\n1 0\n-1 0\n")
    (tmp_path / "xor.cnf").write_text("p cnf 2 2\n1 2 0\n-1 -2 0\n")
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_verify(files, capsys):
    code, out = run(capsys, "verify", "-i", files / "i2x2.txt", "-m", files / "s.txt")
    assert code == 0 and out.out == "POPULAR\n"
    code, out = run(capsys, "verify", "-i", files / "i2x2.txt", "-m", files / "s.txt", "--dominant")
    assert code == 1 and out.out.splitlines() == ["POPULAR", "NOT DOMINANT", "AUGMENTING a1 b1 a2 b2"]
    code, out = run(capsys, "verify", "-i", files / "i2x2.txt", "-m", files / "d.txt", "--dominant")
    assert code == 0 and out.out.splitlines() == ["POPULAR", "DOMINANT"]
    code, out = run(capsys, "verify", "-i", files / "i2x2.txt", "-m", files / "bad.txt")
    lines = out.out.splitlines()
    assert code == 1 and lines[0] == "NOT POPULAR" and lines[1].startswith("WITNESS iii a2")


def test_stable(files, capsys):
    code, out = run(capsys, "stable", "-i", files / "i2x2.txt")
    assert code == 0 and out.out == "a2 b1\n"
    code, out = run(capsys, "stable", "-i", files / "i2x2.txt", "--side", "B", "-o", files / "o.txt")
    assert code == 0 and (files / "o.txt").read_text() == "a2 b1\n"
    code, out = run(capsys, "stable", "-i", files / "i2x2.txt", "--weights", files / "w.txt", "--max")
    assert code == 0 and out.out == "# weight 1\na2 b1\n"
    code, out = run(capsys, "stable", "-i", files / "i2x2.txt", "--list")
    assert code == 0 and out.out == "# stable matching 1\na2 b1\n"


def test_stable_flag_errors(files, capsys):
    assert run(capsys, "stable", "-i", files / "i2x2.txt", "--weights", files / "w.txt")[0] == 2
    assert run(capsys, "stable", "-i", files / "i2x2.txt", "--list", "--weights", files / "w.txt", "--max")[0] == 2


def test_dominant(files, capsys):
    code, out = run(capsys, "dominant", "-i", files / "i2x2.txt", "--emit-gprime", files / "gp.txt")
    assert code == 0 and out.out == "a1 b1\na2 b2\n"
    gp = parse_instance((files / "gp.txt").read_text())
    assert gp.prefs["b1"] == ("a2_1", "a1_1", "a2_0", "a1_0")
    code, out = run(capsys, "dominant", "-i", files / "i2x2.txt", "--weights", files / "w.txt", "--max")
    assert code == 0 and out.out.startswith("# weight 4\n")


def test_pmffe(files, capsys):
    code, out = run(capsys, "pmffe", "-i", files / "i2x2.txt", "--force-node", "a1")
    assert code == 0 and out.out == "# Found case e\na1 b1\na2 b2\n"
    code, out = run(capsys, "pmffe", "-i", files / "i2x2.txt", "--forbid-node", "b1")
    assert code == 1
    code, out = run(capsys, "pmffe", "-i", files / "i2x2.txt", "--forbid-edge", "b1:a2")
    assert code == 0 and "a2 b2" in out.out
    args = ["pmffe", "-i", files / "i2x2.txt"]
    for e in ("a1:b1", "a2:b1", "a2:b2"):
        args += ["--forbid-edge", e]
    assert run(capsys, *args)[0] == 3
    assert run(capsys, *args, "--allow-exponential")[0] == 1
    assert run(capsys, *args, "--allow-exponential", "--edge-limit", "2")[0] == 3
    assert run(capsys, "pmffe", "-i", files / "i2x2.txt", "--force-edge", "a1:b2")[0] == 2
    assert run(capsys, "pmffe", "-i", files / "i2x2.txt", "--force-edge", "a1b2")[0] == 2
    assert run(capsys, "pmffe", "-i", files / "i2x2.txt", "--force-node", "zz")[0] == 2


def test_reduce_then_pmffe(files, capsys):
    code, out = run(capsys, "reduce", "-i", files / "unsat.cnf", "-o", files / "g.txt", "--map", files / "m.json")
    assert code == 0 and out.out.splitlines()[2] == "forbidden s:t w:x"
    gm = json.loads((files / "m.json").read_text())
    assert gm["forbidden"] == [["s", "t"], ["w", "x"]]
    assert len(gm["evicted_edges"]) == 1
    code, _ = run(
        capsys, "pmffe", "-i", files / "g.txt", "--forbid-edge", "s:t", "--forbid-edge", "w:x", "--allow-exponential"
    )
    assert code == 1
    run(capsys, "reduce", "-i", files / "xor.cnf", "-o", files / "g2.txt")
    args = ["pmffe", "-i", files / "g2.txt", "--forbid-edge", "s:t", "--forbid-edge", "w:x", "--allow-exponential"]
    # more edges than the default exhaustive-search limit
    assert run(capsys, *args)[0] == 3
    code, out = run(capsys, *args, "--edge-limit", "0")
    assert code == 0
    ps = parse_instance((files / "g2.txt").read_text())
    m = parse_matching(ps, out.out)
    assert ("u", "t") in m and ("s", "t") not in m


def test_reduce_normalize(files, capsys):
    (files / "mixed.cnf").write_text("p cnf 2 1\n1 -2 0\n")
    assert run(capsys, "reduce", "-i", files / "mixed.cnf", "-o", files / "g.txt")[0] == 2
    code, out = run(capsys, "reduce", "-i", files / "mixed.cnf", "-o", files / "g.txt", "--normalize")
    assert code == 0 and out.out.startswith("vertices ")


def test_weighted_commands(files, capsys):
    code, out = run(capsys, "mwp", "-i", files / "i2x2.txt", "--weights", files / "w.txt")
    assert code == 0
    assert out.out.splitlines()[:4] == ["# weight 4", "# stable 1", "# dominant 4", "# bound 8"]
    code, out = run(capsys, "mwp", "-i", files / "i2x2.txt", "--weights", files / "w.txt", "--exact")
    assert code == 3
    code, out = run(
        capsys, "miwp", "-i", files / "i2x2.txt", "--weights", files / "w.txt", "--exact", "--allow-exponential"
    )
    assert code == 0 and out.out == "# weight 1\n# exact\na2 b1\n"
    assert run(capsys, "miwp", "-i", files / "i2x2.txt", "--weights", files / "w.txt")[0] == 3
    code, out = run(capsys, "mwp", "-i", files / "i2x2.txt", "--node-weights", files / "nw.txt")
    assert code == 0 and out.out.startswith("# node-weight 1\n")
    code, out = run(capsys, "miwp", "-i", files / "i2x2.txt", "--node-weights", files / "nw.txt")
    assert code == 0 and out.out == "# node-weight 0\na2 b1\n"


def test_enumerate(files, capsys):
    code, out = run(capsys, "enumerate", "-i", files / "i2x2.txt", "--report", files / "r.txt")
    assert code == 0
    assert out.out.splitlines()[:2] == ["matchings 5", "popular 2"]
    report = (files / "r.txt").read_text().splitlines()
    assert "dominant a1:b1 a2:b2" in report
    assert run(capsys, "enumerate", "-i", files / "i2x2.txt", "--cap", "3")[0] == 3


def test_input_errors(files, capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "verify", "-i", files / "nope.txt", "-m", files / "s.txt")[0] == 2
    (files / "broken.txt").write_text("popmatch-instance v1\nA: a\n")
    code, out = run(capsys, "stable", "-i", files / "broken.txt")
    assert code == 2 and "error:" in out.err


def test_deterministic(files, capsys):
    first = run(capsys, "mwp", "-i", files / "i2x2.txt", "--weights", files / "w.txt")
    second = run(capsys, "mwp", "-i", files / "i2x2.txt", "--weights", files / "w.txt")
    assert first[1].out == second[1].out


def test_selftest_small(capsys):
    code, out = run(capsys, "selftest", "--scale", "0.02", "--only", "1", "--only", "6")
    lines = out.out.splitlines()
    assert code == 0 and len(lines) == 2 and all(line.startswith("[PASS]") for line in lines)


@pytest.mark.skipif(shutil.which("popmatch") is None, reason="console script not installed")
def test_console_script(files):
    proc = subprocess.run(
        ["popmatch", "stable", "-i", str(files / "i2x2.txt")], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and proc.stdout == "a2 b1\n"
