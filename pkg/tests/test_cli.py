import json

import pytest

from metric_forge.cli import main
from metric_forge.metric import MatchedMetric

DATA = __import__("pathlib").Path(__file__).resolve().parent.parent / "data"
COUNTER = str(DATA / "counterexample3.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_synthesize_bac_to_file(tmp_path, capsys):
    out = tmp_path / "metric.json"
    code, stdout, _ = run(capsys, "synthesize", "--bac", "p=1/10,q=1/5,m=3", "--delta", "1/4", "--out", str(out))
    assert code == 0
    assert "space size: 8" in stdout and "delta: 1/4" in stdout
    doc = json.loads(out.read_text())
    assert len(doc["matrix"]) == 8 and all(len(r) == 8 for r in doc["matrix"])
    assert not list(tmp_path.glob(".*.tmp"))


def test_synthesize_counterexample(capsys):
    code, stdout, _ = run(capsys, "synthesize", "--channel", COUNTER)
    assert code == 0
    d = MatchedMetric.from_json(json.loads(stdout))
    a, b, c = 0, 1, 2
    assert d.values[a, c] < d.values[b, c] < d.values[a, b]


def test_synthesize_cycle_exits_2(tmp_path, capsys):
    path = tmp_path / "rps.json"
    path.write_text(json.dumps({
        "labels": ["1", "2", "3"],
        "matrix": [["0", "1/2", "1/4"], ["1/4", "0", "1/2"], ["1/2", "1/4", "0"]],
        "stochastic_axis": "none",
    }))
    code, stdout, err = run(capsys, "synthesize", "--channel", str(path))
    assert code == 2
    w = json.loads(stdout)["witness"]
    assert len(w["pairs"]) == 3 and w["elements"] == ["1", "3", "2"]
    assert "cycle of length 3" in err


def test_csv_and_text(capsys):
    code, stdout, _ = run(capsys, "synthesize", "--channel", COUNTER, "--format", "csv")
    assert code == 0 and stdout.splitlines()[:2] == ["a,b,c", "0,5/4,3/4"]
    code, stdout, _ = run(capsys, "synthesize", "--bsc", "p=1/4,m=2", "--format", "text")
    assert code == 0 and stdout.splitlines()[0].split() == ["00", "01", "10", "11"]


def test_oracle_strong_exists(capsys):
    code, stdout, _ = run(capsys, "oracle", "strong-exists", "--channel", COUNTER)
    assert code == 0 and stdout.strip() == "exists: false"


def test_oracle_premise(capsys):
    code, stdout, _ = run(capsys, "oracle", "premise", "--channel", COUNTER, "--max-len", "6")
    assert code == 0 and "premise holds" in stdout


def test_oracle_scale_exit_4(capsys):
    code, _, err = run(capsys, "oracle", "strong-exists", "--bsc", "p=1/4,m=3")
    assert code == 4 and "error" in err


@pytest.mark.parametrize("inline", [("--bac", "p=1/10,q=1/5,m=4"), ("--z", "p=0,q=1/4,m=3")])
def test_verify_round_trip(tmp_path, capsys, inline):
    out = tmp_path / "m.json"
    assert run(capsys, "synthesize", *inline, "--out", str(out))[0] == 0
    code1, text1, _ = run(capsys, "verify", *inline, "--metric", str(out), "--format", "json")
    code2, text2, _ = run(capsys, "verify", *inline, "--metric", str(out), "--format", "json")
    assert code1 == code2 == 0 and text1 == text2
    doc = json.loads(text1)
    assert doc["overall"] in ("weak-matched", "strong-matched")
    assert doc["compatibility_violations"] == []


def test_verify_counterexample_weak_note(tmp_path, capsys):
    out = tmp_path / "m.json"
    run(capsys, "synthesize", "--channel", COUNTER, "--out", str(out))
    code, stdout, _ = run(capsys, "verify", "--channel", COUNTER, "--metric", str(out))
    assert code == 0 and "weak-matched" in stdout and "note:" in stdout


def test_verify_failure_exit_3(tmp_path, capsys):
    out = tmp_path / "uniform.json"
    out.write_text(json.dumps({
        "labels": ["a", "b", "c"], "delta": "1/4",
        "matrix": [["0", "1", "1"], ["1", "0", "1"], ["1", "1", "0"]],
    }))
    code, stdout, _ = run(capsys, "verify", "--channel", COUNTER, "--metric", str(out))
    assert code == 3 and "not-matched" in stdout


@pytest.mark.parametrize("argv", [
    ("synthesize", "--bac", "p=1/10,q=1/10,m=2"),
    ("synthesize", "--bac", "p=1/10"),
    ("synthesize", "--channel", "/nonexistent.json"),
    ("synthesize", "--channel", COUNTER, "--delta", "1/3"),
    ("synthesize",),
    ("verify", "--channel", COUNTER, "--metric", "/nonexistent.json"),
])
def test_input_errors_exit_1(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_space_cap_env(monkeypatch, capsys):
    monkeypatch.setenv("METRIC_FORGE_MAX_SPACE", "4")
    assert run(capsys, "synthesize", "--bsc", "p=1/4,m=3")[0] == 1
    assert run(capsys, "synthesize", "--bsc", "p=1/4,m=3", "--max-space", "8")[0] == 0


def test_product_spec_file(tmp_path, capsys):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"kind": "BAC", "p": "1/10", "q": "1/5", "m": 2}))
    code, stdout, _ = run(capsys, "analyze", "--channel", str(path))
    assert code == 0 and "acyclic: True" in stdout and "exact zero: True" in stdout


def test_float_mode(capsys):
    code, stdout, _ = run(capsys, "synthesize", "--bac", "p=1/10,q=1/5,m=3", "--mode", "float")
    assert code == 0
    assert isinstance(json.loads(stdout)["matrix"][0][1], float)


def test_analyze_cycle(tmp_path, capsys):
    path = tmp_path / "rps.json"
    path.write_text(json.dumps({
        "matrix": [[0, "1/2", "1/4"], ["1/4", 0, "1/2"], ["1/2", "1/4", 0]], "stochastic_axis": "none",
    }))
    code, stdout, _ = run(capsys, "analyze", "--channel", str(path))
    assert code == 0 and "acyclic: False" in stdout and "shortest cycle length: 3" in stdout


def test_selftest(capsys):
    code, stdout, _ = run(capsys, "selftest", "--max-m", "3")
    assert code == 0 and "FAIL" not in stdout and "all passed" in stdout


def test_deterministic_output(capsys):
    outs = {run(capsys, "synthesize", "--bac", "p=3/10,q=1/20,m=4")[1] for _ in range(2)}
    assert len(outs) == 1
