import json
import subprocess
import sys

import pytest

from bieberbach.cli import MUTATIONS, from_csv, main, to_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_b3(capsys):
    code, out, _ = run(capsys, "classify", "--space", "B3")
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == 1 and doc["command"] == "classify"
    assert [row["eta"] for row in doc["rows"]] == ["-2/3", "4/3"]


def test_classify_all_csv(capsys):
    code, out, _ = run(capsys, "classify", "--all", "--format", "csv")
    table = [line for line in out.splitlines() if not line.startswith("#")]
    assert code == 0 and len(table) == 17


@pytest.mark.parametrize("argv", [
    ("classify", "--all"),
    ("spectrum", "--space", "B3", "--window", "4"),
    ("eta", "--space", "B4", "--sigma", "-1", "--kappa", "-1"),
])
def test_csv_and_json_carry_the_same_document(capsys, argv):
    _, as_json, _ = run(capsys, *argv)
    _, as_csv, _ = run(capsys, *argv, "--format", "csv")
    doc = json.loads(as_json)
    assert from_csv(as_csv) == from_csv(to_csv(doc))
    parsed = from_csv(as_csv)
    assert parsed["meta"] == doc["meta"] and len(parsed["rows"]) == len(doc["rows"])
    for got, want in zip(parsed["rows"], doc["rows"]):
        assert {k: str(v) for k, v in got.items()} == {k: str(v) for k, v in want.items()}


def test_spectrum_agrees(capsys):
    code, out, _ = run(capsys, "spectrum", "--space", "B3", "--window", "5")
    doc = json.loads(out)
    assert code == 0 and doc["meta"]["agree"] is True
    sp1 = [r for r in doc["rows"] if r["source"] == "Sp1" and r["lambda_squared"] == "1/4"]
    assert sp1 and sp1[0]["multiplicity"] == 2


def test_spectrum_without_zero_line(capsys):
    code, out, _ = run(capsys, "spectrum", "--space", "B2", "--epsilon2", "1/2", "--window", "4")
    doc = json.loads(out)
    assert code == 0 and {r["source"] for r in doc["rows"]} == {"Sp3"}


@pytest.mark.parametrize("argv, fragment", [
    (("eta", "--space", "B4", "--epsilon2", "1/2"), "ε₂ = ε₃"),
    (("eta", "--space", "B6", "--epsilon2", "1/2"), "ε₂ = ε₃ = 0"),
    (("spectrum", "--space", "B3", "--tau-branch", "1"), "B2 only"),
    (("spectrum", "--space", "B3", "--window", "3", "--lambda-sq-max", "100"), "cutoff"),
    (("verify", "--window", "1"), "margin insufficient"),
    (("classify",), "exactly one of"),
    (("eta", "--space", "B3", "--kappa", "-1"), "κ"),
])
def test_invalid_input_exits_2(capsys, argv, fragment):
    code, _, err = run(capsys, *argv)
    assert code == 2 and fragment in err


def test_unsafe_cutoff_is_allowed(capsys):
    code, out, _ = run(capsys, "spectrum", "--space", "B3", "--window", "3",
                       "--lambda-sq-max", "10", "--unsafe-cutoff")
    assert code in (0, 1) and json.loads(out)["rows"]


@pytest.mark.parametrize("argv, eta", [
    (("--space", "B4", "--sigma", "-1", "--kappa", "1"), "3/2"),
    (("--space", "B6", "--sigma", "1", "--kappa", "1"), "-5/3"),
    (("--space", "B2", "--sigma", "1"), "-1"),
])
def test_eta(capsys, argv, eta):
    code, out, _ = run(capsys, "eta", *argv)
    doc = json.loads(out)
    assert code == 0 and doc["meta"]["eta"] == eta
    assert all(row["oracle_delta"] < 1e-6 for row in doc["rows"])


def test_out_file(tmp_path, capsys):
    target = tmp_path / "b6.json"
    assert main(["classify", "--space", "B6", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert len(json.loads(target.read_text())["rows"]) == 2


@pytest.mark.slow
def test_verify_full(capsys):
    code, out, _ = run(capsys, "verify", "--window", "4", "--no-timing")
    doc = json.loads(out)
    assert code == 0 and doc["meta"]["ok"] and doc["meta"]["passed"] == doc["meta"]["checks"]
    assert all("seconds" not in row for row in doc["rows"])


@pytest.mark.slow
@pytest.mark.parametrize("mutation", MUTATIONS)
def test_verify_detects_mutants(capsys, mutation):
    code, out, err = run(capsys, "verify", "--window", "3", "--mutate", mutation)
    doc = json.loads(out)
    assert code == 1 and not doc["meta"]["ok"]
    assert err.startswith("verification failed:")


def test_output_is_deterministic(capsys):
    outs = [run(capsys, "classify", "--all", "--format", "csv")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bieberbach.cli", "classify", "--space", "B6"],
                          capture_output=True, text=True, check=True)
    assert [r["eta"] for r in json.loads(proc.stdout)["rows"]] == ["-1/3", "5/3"]
