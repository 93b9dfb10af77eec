import json
import os
import subprocess
import sys

import pytest

from cyclicsep.cli import main, write_atomic
from cyclicsep.selftest import corpus

from helpers import G22_TEXT


@pytest.mark.parametrize("label,argv,code", corpus(), ids=[c[0] for c in corpus()])
def test_corpus_exit_codes(label, argv, code, capsys):
    assert main(argv) == code


def test_files_as_arguments(tmp_path, capsys):
    spec = tmp_path / "spec.txt"
    spec.write_text(G22_TEXT)
    g, c = tmp_path / "g.txt", tmp_path / "c.txt"
    g.write_text("a b\n")
    c.write_text("a\n")
    out = tmp_path / "cert.json"
    assert main(["separate", "--pi", "2", "--max-order", "16", str(g), str(c), str(spec), "--out", str(out)]) == 0
    text = out.read_text()
    assert json.loads(text)["claim"] == "separated"
    assert main(["verify", str(out)]) == 0
    assert "certificate verified" in capsys.readouterr().out
    # tamper with the table
    d = json.loads(text)
    d["group"]["table"][1][1] = d["group"]["table"][1][0]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    assert main(["verify", str(bad)]) == 1
    assert "step (i)" in capsys.readouterr().out
    (tmp_path / "junk.json").write_text("[1, 2")
    assert main(["verify", str(tmp_path / "junk.json")]) == 3
    assert not [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")]


def test_json_mode(capsys):
    assert main(["isolated", "--json", "a^3", G22_TEXT]) == 1
    d = json.loads(capsys.readouterr().out)
    assert d["status"] == "not-isolated" and d["q"] == 3
    assert main(["len", "--json", "a b a", G22_TEXT]) == 0
    assert json.loads(capsys.readouterr().out) == {"length": 3}
    assert main(["criterion", "--json", "--pi", "all", G22_TEXT]) == 0
    assert json.loads(capsys.readouterr().out)["pi"] == "all"
    assert main(["separate", "--json", "a", "a^3", G22_TEXT]) == 1
    d = json.loads(capsys.readouterr().out)
    assert d["result"] == "not-separable" and d["q"] == 3


def test_nf_output_round_trips(capsys):
    assert main(["nf", "a b a^-1 b^-1", G22_TEXT]) == 0
    text = capsys.readouterr().out.strip()
    assert main(["eq", text, "a b a^-1 b^-1", G22_TEXT]) == 0


def test_usage_errors(capsys):
    assert main([]) == 3
    assert main(["separate", "a"]) == 3
    assert main(["nf", "a", "A = free(a)\nB = free(a)\nH = subgroup(A; a)\nK = subgroup(B; a)\n"
                 "G = commprod(A, H, B, K)\n"]) == 3
    assert main(["isolated", "1", G22_TEXT]) == 3
    assert main(["criterion", "--pi", "4", G22_TEXT]) == 3


def test_selftest_command(capsys):
    assert main(["selftest", "--seed", "3"]) == 0
    assert "passed" in capsys.readouterr().out


def test_write_atomic(tmp_path):
    p = tmp_path / "x.json"
    write_atomic(str(p), "one")
    write_atomic(str(p), "two")
    assert p.read_text() == "two"
    assert os.listdir(tmp_path) == ["x.json"]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "cyclicsep.cli", "len", "a b", G22_TEXT],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "2"
