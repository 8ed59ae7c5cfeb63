import json
import subprocess
import sys
from importlib.resources import files

import pytest

from frchoquet.cli import main

FLU = str(files("frchoquet").joinpath("data/flu.csv"))
FLU_MU = str(files("frchoquet").joinpath("data/flu_mu.json"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def values_by_subset(doc):
    return {tuple(e["subset"]): e["value"] for e in doc["entries"]}


def test_measure_all(capsys):
    code, out, _ = run(capsys, "measure", "--input", FLU, "--no-normalize", "--kind", "gamma-d",
                       "--base", "manhattan", "--all", "--audit")
    assert code == 0
    doc = json.loads(out)
    vals = values_by_subset(doc)
    assert len(vals) == 8
    assert vals[()] == 0.0 and vals[("a1", "a2", "a3")] == 1.0
    assert vals[("a2", "a3")] == pytest.approx(0.83, abs=0.005)
    assert doc["audit"] == []


def test_measure_counting_without_data(capsys):
    code, out, _ = run(capsys, "measure", "--kind", "counting", "--normalized", "--all", "--n-attributes", "3")
    assert code == 0
    for subset, value in values_by_subset(json.loads(out)).items():
        assert value == pytest.approx(len(subset) / 3)


def test_measure_selected_subsets(capsys):
    code, out, _ = run(capsys, "measure", "--input", FLU, "--no-normalize", "--subset", "a2",
                       "--subset", "a2,a3")
    assert code == 0
    assert list(values_by_subset(json.loads(out))) == [("a2",), ("a2", "a3")]


def test_measure_cross_class_duplicates_exit_3(capsys, tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text("a1,a2,d\n0.1,0.2,1\n0.1,0.2,0\n0.5,0.9,0\n")
    code, _, err = run(capsys, "measure", "--input", str(path), "--kind", "delta-d", "--all")
    assert code == 3
    assert "duplicate" in err


def test_distmat_explicit_measure(capsys):
    code, out, _ = run(capsys, "distmat", "--input", FLU, "--no-normalize", "--kind", "explicit",
                       "--measure-file", FLU_MU, "--p", "1", "--round", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == ",x1,x2,x3,x4"
    assert lines[3] == "x3,0.24,0.23,0.00,0.20"


def test_distmat_weights_json(capsys):
    code, out, _ = run(capsys, "distmat", "--input", FLU, "--no-normalize", "--kind", "additive",
                       "--weights", "0.2,0.4,0.4", "--format", "json", "--round", "2")
    assert code == 0
    assert json.loads(out)["matrix"][1] == [0.22, 0.0, 0.58, 0.76]


def test_distmat_gamma(capsys, tmp_path):
    target = tmp_path / "d.json"
    code, _, _ = run(capsys, "distmat", "--input", FLU, "--no-normalize", "--format", "json",
                     "--output", str(target), "--threads", "2")
    assert code == 0
    m = json.loads(target.read_text())["matrix"]
    assert m[2][3] == pytest.approx(0.34, abs=0.005)


def test_distmat_infinite_p_rejected_for_non_counting(capsys):
    code, _, err = run(capsys, "distmat", "--input", FLU, "--no-normalize", "--p", "inf")
    assert code == 3 and "counting" in err


@pytest.mark.parametrize("kind, extra, accuracy", [
    ("gamma-d", [], 0.75),
    ("counting", ["--normalized"], 0.5),
])
def test_eval_loo(capsys, kind, extra, accuracy):
    code, out, err = run(capsys, "eval", "--input", FLU, "--no-normalize", "--loo", "--kind", kind,
                         "--p", "1", "--k", "1", *extra)
    assert code == 0
    assert json.loads(out)["accuracy"] == accuracy
    assert "accuracy" in err


def test_eval_kfold_and_summary(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "eval", "--input", FLU, "--no-normalize", "--kfold", "2", "--seed", "42",
                       "--output", str(target), "--measures")
    assert code == 0
    assert "2-fold" in out
    report = json.loads(target.read_text())
    assert report["accuracy"] == 0.75 and len(report["fold_measures"]) == 2


def test_classify(capsys, tmp_path):
    query = tmp_path / "q.csv"
    query.write_text("a1,a2,a3,d\n0,1,0,0\n0.9,0.95,0.9,1\n")
    code, out, err = run(capsys, "classify", "--train", FLU, "--query", str(query), "--no-normalize")
    assert code == 0
    doc = json.loads(out)
    assert [p["winner"] for p in doc["predictions"]] == [0, 1]
    assert doc["accuracy"] == 1.0
    assert "q1: 0" in err


def test_classify_arity_mismatch_exit_2(capsys, tmp_path):
    query = tmp_path / "q.csv"
    query.write_text("a1,a2\n0,1\n")
    code, _, _ = run(capsys, "classify", "--train", FLU, "--query", str(query))
    assert code == 2


def test_usage_errors_exit_2(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["measure", "--input", FLU])
    assert exc.value.code == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("a1,d\n1,0\nabc,1\n")
    code, _, err = run(capsys, "measure", "--input", str(bad), "--all")
    assert code == 2 and "abc" in err
    wide = tmp_path / "wide.csv"
    wide.write_text("a1,d\n2,0\n3,1\n")
    code, _, _ = run(capsys, "measure", "--input", str(wide), "--no-normalize", "--all")
    assert code == 2


def test_normalisation_by_default(capsys, tmp_path):
    path = tmp_path / "raw.csv"
    path.write_text("a1,a2,d\n0,10,0\n5,20,1\n10,40,1\n")
    code, out, _ = run(capsys, "distmat", "--input", str(path), "--kind", "counting", "--format", "json")
    assert code == 0
    assert json.loads(out)["matrix"][0][2] == 2.0


def test_demo(capsys):
    code, out, _ = run(capsys, "demo")
    assert code == 0
    assert "known-discrepancy" in out and "overall: PASS" in out
    code, out, _ = run(capsys, "demo", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    flagged = [e for c in doc["checks"] for e in c["entries"] if e["status"] != "ok"]
    assert [(e["row"], e["col"], e["status"]) for e in flagged] == [("x4", "x2", "known-discrepancy")]
    assert flagged[0]["computed"] == pytest.approx(0.6333, abs=1e-4)
    code, _, _ = run(capsys, "demo", "--strict")
    assert code == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "frchoquet", "demo", "--json"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["passed"] is True
