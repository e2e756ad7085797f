import json

import numpy as np
import pytest

from ccrfolner.cli import full_suite, main
from ccrfolner.reports import dumps


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_folner_ratio(capsys):
    code, out, _ = run(capsys, "folner-ratio", "--gens", '[["1","0"],["0","1"]]', "--N", "5", "--ops", "W[1,0]")
    assert code == 0
    data = json.loads(out)
    assert data["dim_V"] == 25 and data["rows"][0]["upper"] == "6/5"


def test_compress(capsys):
    code, out, _ = run(capsys, "compress", "--gens", '[["1","0"]]', "--N", "12", "--ops", "W[1,0]",
                       "--pairs", "W[-1,0]|W[1,0]")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert rows[0]["compressed_norm"] == pytest.approx(1)
    assert rows[0]["trace"] == [0.0, 0.0]
    assert rows[1]["defect"] == pytest.approx(0.2)


def test_compress_onesided_csv(capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, _, _ = run(capsys, "--format", "csv", "--out", str(out), "compress", "--gens", '[["1","0"]]',
                     "--N", "3", "--box", "onesided", "--ops", "W[1,0]")
    assert code == 0
    assert out.read_text().startswith("compressed_norm,defect,k,l1_bound,op")


def test_hypertrace(capsys):
    code, out, _ = run(capsys, "hypertrace", "--gens", '[["1","0"]]', "--N", "4", "--ops", "W[1,0],W[0,0]")
    rows = json.loads(out)["rows"]
    assert code == 0
    assert rows[0]["trace_norm"] == pytest.approx(2 / 9)
    assert rows[0]["combinatorial_prediction"] == pytest.approx(2 / 9)
    assert rows[1]["trace_norm"] == 0


def test_parse_error_exit(capsys):
    code, _, err = run(capsys, "hypertrace", "--gens", '[["1","0"]]', "--N", "4", "--ops", "W[1]")
    assert code == 2 and "arity" in err
    code, _, err = run(capsys, "hypertrace", "--gens", '[["1","0"]]', "--N", "3", "--R", "3", "--ops", "W[1,0]")
    assert code == 2 and "ambient box too small" in err
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2


def test_cp_pipeline(capsys, tmp_path):
    sample = tmp_path / "s.json"
    code, _, _ = run(capsys, "--seed", "42", "--out", str(sample), "cp", "synth", "--gens",
                     '[["1","0"],["0","1"]]', "--N", "2", "--ops", "W[1,0],W[0,1]", "--spread", "1e-4")
    assert code == 0
    first = sample.read_text()
    run(capsys, "--seed", "42", "--out", str(sample), "cp", "synth", "--gens",
        '[["1","0"],["0","1"]]', "--N", "2", "--ops", "W[1,0],W[0,1]", "--spread", "1e-4")
    assert sample.read_text() == first

    code, out, _ = run(capsys, "cp", "split", "--in", str(sample), "--eps", "0.1")
    split = json.loads(out)
    assert code == 0 and split["within_bound"]

    psi = tmp_path / "psi.json"
    code, out, _ = run(capsys, "cp", "unitalize", "--in", str(sample), "--eps", "0.1", "--out", str(psi))
    assert code == 0 and json.loads(out)["unit_error"] < 1e-10
    data = json.loads(psi.read_text())
    unit = np.array(data["unit"])[..., 0]
    assert np.allclose(unit, np.eye(data["k"]))

    code, out, _ = run(capsys, "cp", "certify", "--in", str(sample), "--eps", "1e-6")
    assert code == 1 and not json.loads(out)["pass"]
    code, out, _ = run(capsys, "cp", "certify", "--in", str(sample), "--eps", "10")
    assert code == 0


def test_cp_usage(capsys):
    code, _, err = run(capsys, "cp", "split")
    assert code == 2 and "--in" in err
    code, _, err = run(capsys, "cp", "synth", "--gens", '[["1","0"]]', "--N", "2", "--ops", "W[1,0]")
    assert code == 2 and "--seed" in err


def test_resolvent_residuals(capsys):
    params = json.dumps({"lam": 1, "nu": 2, "f": [1, 0]})
    code, out, _ = run(capsys, "resolvent", "residuals", "--levels", "16", "--relation", "scaling",
                       "--params", params)
    data = json.loads(out)
    assert code == 0 and data["relation"] == "scaling" and data["raw"] <= 1e-12
    code, _, err = run(capsys, "resolvent", "residuals", "--relation", "product", "--params", params)
    assert code == 2 and "[product]" in err


def test_resolvent_character(capsys):
    code, out, _ = run(capsys, "--seed", "7", "resolvent", "character", "--mu", "[2, 0]",
                       "--words", "R(1;1,0),R(1;0,0)*adj(R(1;0,0))")
    data = json.loads(out)
    assert code == 0
    assert data["values"][0]["value"] == pytest.approx([-0.4, -0.2])
    assert data["values"][1]["value"] == pytest.approx([1, 0])
    assert data["relations"]["pass"] and data["relations"]["mult_domain_distance"] == 0


def test_sweep_cli(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"command": "hypertrace", "gens": [["1", "0"]], "grid": {"N": [2, 4, 8]},
                                "ops": ["W[1,0]"], "tolerance": 1e-12}))
    code, out, _ = run(capsys, "sweep", "--spec", str(spec), "--jobs", "2")
    assert code == 0
    assert len(json.loads(out)["rows"]) == 4
    spec.write_text(json.dumps({"command": "hypertrace", "gens": [["1", "0"]], "grid": {},
                                "ops": ["W[1,0]"]}))
    code, out, _ = run(capsys, "sweep", "--spec", str(spec))
    assert code == 0 and json.loads(out)["rows"] == []
    spec.write_text(json.dumps({"command": "hypertrace", "gens": [["1", "0"]], "grid": {"N": [1, 2]},
                                "ops": ["W[3,0]"], "R": 4}))
    code, out, _ = run(capsys, "sweep", "--spec", str(spec))
    assert code == 2 and len(json.loads(out)["rows"]) == 1


def test_suite_deterministic(capsys):
    code, a, _ = run(capsys, "--seed", "5", "suite")
    code2, b, _ = run(capsys, "--seed", "5", "suite")
    assert code == code2 == 0
    assert a == b
    assert dumps(full_suite(6)) != a
