import json
import subprocess
import sys

import pytest

from curtains import io
from curtains.cli import run


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


EX36 = {
    "schema_version": 1, "type": "monodromy_data", "degree": 3, "n": 2, "beta": "s1 s1 s1",
    "images": [{"conjugator": "e", "index": 1, "sign": 1}, {"conjugator": "e", "index": 2, "sign": 1}],
}
BAD = dict(EX36, beta="s1")


def test_braid_eq_relation(capsys):
    assert run(["braid", "eq", "s1 s2 s1", "s2 s1 s2", "-d", "3"]) == 0
    assert capsys.readouterr().out.strip() == "equal"


def test_braid_eq_figure_word(capsys):
    assert run(["braid", "eq", "s1^-1 s2^-1 s1^-1 s2 s2 s1 s2", "s1", "-d", "4"]) == 0
    assert capsys.readouterr().out.strip() == "equal"


def test_braid_eq_unequal(capsys):
    assert run(["braid", "eq", "s1", "s2", "-d", "3"]) == 1
    assert "not equal" in capsys.readouterr().out


def test_braid_nf(capsys):
    assert run(["braid", "nf", "s1 s2 s1 s1^-1", "-d", "3"]) == 0
    assert "word: s1 s2" in capsys.readouterr().out


def test_malformed_word_is_status_2(capsys):
    assert run(["braid", "eq", "s7", "s1", "-d", "3"]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_arguments_is_status_2():
    assert run(["braid", "eq", "s1"]) == 2
    assert run([]) == 2


def test_build_bad_data_reports_index(tmp_path, capsys):
    assert run(["curtain", "build", "--data", write(tmp_path / "bad.json", BAD)]) == 1
    assert "Hurwitz fixedness failed at index 1" in capsys.readouterr().err


def test_missing_file_is_status_2(tmp_path, capsys):
    assert run(["curtain", "build", "--data", str(tmp_path / "none.json")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_schema_error_is_status_2(tmp_path, capsys):
    doc = dict(EX36, extra=1)
    assert run(["curtain", "build", "--data", write(tmp_path / "m.json", doc)]) == 2
    assert "/extra" in capsys.readouterr().err


def test_full_pipeline(tmp_path, capsys):
    data = write(tmp_path / "m.json", EX36)
    out = str(tmp_path / "c.json")
    assert run(["curtain", "build", "--data", data, "--out", out]) == 0
    assert run(["curtain", "validate", "--curtain", out]) == 0
    assert run(["curtain", "validate", "--curtain", out, "--strict-reject-certified"]) == 1
    capsys.readouterr()
    assert run(["curtain", "boundary", "--curtain", out]) == 0
    assert "closed braid: s1 s1 s1 in B_2" in capsys.readouterr().out
    assert run(["curtain", "monodromy", "--curtain", out]) == 0
    assert capsys.readouterr().out.split("\n")[:2] == ["x1: s1", "x2: s2"]
    film = tmp_path / "film"
    assert run(["curtain", "render", "--curtain", out, "--out-dir", str(film), "--slices", "3"]) == 0
    assert sorted(p.name for p in film.iterdir()) == ["slice_000.svg", "slice_001.svg", "slice_002.svg"]
    report = str(tmp_path / "r.json")
    assert run(["cover", "analyze", "--data", data, "--curtain", out, "--out", report]) == 0
    assert "components: 1" in capsys.readouterr().out
    rep = io.load_file(report, "cover_report")
    assert rep.ledger.counts() == (2, 2)


def test_strict_build_rejects_certified(tmp_path, capsys):
    data = write(tmp_path / "m.json", EX36)
    assert run(["curtain", "build", "--data", data, "--strict-reject-certified"]) == 1


def test_zero_slices_is_status_2(tmp_path):
    data = write(tmp_path / "m.json", EX36)
    out = str(tmp_path / "c.json")
    run(["curtain", "build", "--data", data, "--out", out])
    assert run(["curtain", "render", "--curtain", out, "--out-dir", str(tmp_path / "f"), "--slices", "0"]) == 2


def test_chart_commands(tmp_path, capsys):
    from curtains.braid import BandGeneratorForm, BraidWord
    from curtains.chart import build_ribbon_chart

    c = build_ribbon_chart([BandGeneratorForm(BraidWord.from_ints(3, [-2]), 1)])
    path = str(tmp_path / "c.json")
    io.save_file(path, c)
    assert run(["chart", "validate", "--chart", path]) == 0
    assert run(["chart", "monodromy", "--chart", path]) == 0
    assert "x1: s2^-1 s1 s2" in capsys.readouterr().out
    svg = tmp_path / "c.svg"
    assert run(["chart", "render", "--chart", path, "--out", str(svg)]) == 0
    assert svg.read_text().startswith("<?xml")


def test_invalid_chart_is_status_1(tmp_path, capsys):
    # a lone black vertex with no edge
    doc = {
        "schema_version": 1, "type": "chart", "degree": 2,
        "rect": [["-1", "1"], ["0", "1"], ["1", "1"], ["1", "1"]],
        "vertices": [{"id": "v", "kind": "black", "pos": [["0", "1"], ["1", "2"]]}],
        "edges": [],
    }
    assert run(["chart", "validate", "--chart", write(tmp_path / "c.json", doc)]) == 1
    assert "v" in capsys.readouterr().out


def test_sample_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["curtain", "sample", "--seed", "11", "--out", str(a)])
    run(["curtain", "sample", "--seed", "11", "--out", str(b)])
    assert a.read_text() == b.read_text()
    assert run(["curtain", "build", "--data", str(a)]) == 0


@pytest.mark.parametrize("script", ["curtains", "braid"])
def test_console_scripts(script):
    args = [script] + (["braid"] if script == "curtains" else []) + ["eq", "s1 s2 s1", "s2 s1 s2", "-d", "3"]
    res = subprocess.run(args, capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "equal"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "curtains.cli", "braid", "eq", "s1", "s2", "-d", "3"], capture_output=True, text=True)
    assert res.returncode == 1
