import csv
import json

import numpy as np
import pytest

from cohstates.cli import main, parse_complex
from cohstates.states import LabeledKet


def report(out, command):
    return json.loads((out / f"report-{command}.json").read_text())


def test_parse_complex():
    assert parse_complex("0.2i") == 0.2j
    assert parse_complex("0.3+0.4j") == 0.3 + 0.4j
    assert parse_complex("-1") == -1


def test_state_example1_action(tmp_path):
    assert main(["state", "--model", "example1", "--J", "1", "--output-dir", str(tmp_path)]) == 0
    rep = report(tmp_path, "state")
    assert rep["passed"] is True
    res = rep["results"]
    assert abs(res["energy_over_omega"] - 1) <= res["energy"]["error_bound"]
    assert {"version", "python", "numpy"} <= set(rep["provenance"])


def test_state_ket_file_round_trip(tmp_path):
    assert main(["state", "--model", "example3", "--J", "1.5", "--gamma", "0.3", "--output-dir", str(tmp_path)]) == 0
    text = (tmp_path / "state-degenerate.json").read_text()
    ket = LabeledKet.from_json(text)
    assert abs(ket.norm2() - 1) <= 1e-13
    again = LabeledKet.from_json(ket.to_json(indent=1))
    assert np.array_equal(again.coeffs, ket.coeffs)
    rows = list(csv.reader((tmp_path / "state-degenerate.csv").open()))
    assert rows[0][-3:] == ["re", "im", "modulus2"]


def test_state_branch_model(tmp_path):
    assert main(["state", "--model", "boson-two-fermion", "--branch", "2", "--output-dir", str(tmp_path)]) == 0
    assert (tmp_path / "state-branch.json").exists()


def test_verify_example1_all(tmp_path):
    assert main(["verify", "--model", "example1", "--output-dir", str(tmp_path)]) == 0
    res = report(tmp_path, "verify")["results"]
    assert res["resolution"]["status"] == "pass"
    assert res["temporal"]["passed"] and res["action"]["passed"]


def test_verify_example2_is_weak_only(tmp_path):
    assert main(["verify", "--model", "example2", "--suite", "resolution", "--output-dir", str(tmp_path)]) == 0
    res = report(tmp_path, "verify")["results"]["resolution"]
    assert res["status"] == "weak-sense-only" and res["passed"] is None


def test_verify_bare_spectrum(tmp_path):
    code = main(["verify", "--spectrum", "linear", "--omega", "2", "--suite", "temporal,action", "--output-dir", str(tmp_path)])
    assert code == 0
    assert report(tmp_path, "verify")["results"]["temporal"]["residual"] <= 1e-14


def test_landau_report_and_csv(tmp_path):
    assert main(["landau", "--K", "30", "--output-dir", str(tmp_path)]) == 0
    res = report(tmp_path, "landau")["results"]
    assert res["kms"]["monotone"]
    assert res["kms"]["continuation"]["residual"] <= 1e-6
    rows = list(csv.DictReader((tmp_path / "landau-kms.csv").open()))
    assert [int(r["K"]) for r in rows] == [10, 20, 30]
    with (tmp_path / "landau-delta.csv").open() as fh:
        header = next(csv.reader(fh))
    assert header == ["n", "l", "delta"]


def test_landau_unsafe_cutoff_exits_one(tmp_path, capsys):
    assert main(["landau", "--K", "5", "--output-dir", str(tmp_path)]) == 1
    assert "TruncationUnsafe" in capsys.readouterr().err


def test_measure_csv(tmp_path):
    assert main(["measure", "--model", "example1", "--grid-points", "11", "--output-dir", str(tmp_path)]) == 0
    rows = list(csv.DictReader((tmp_path / "measure-example1.csv").open()))
    assert len(rows) == 11
    assert float(rows[0]["density"]) == pytest.approx(2.0)


def test_model_card(tmp_path):
    assert main(["model-card", "--model", "example1", "--J", "1", "--output-dir", str(tmp_path)]) == 0
    card = report(tmp_path, "model-card")["results"]
    assert card["normalization_at_J"]["value"] == pytest.approx(np.e, rel=1e-12)


def test_unknown_config_key_exits_two(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["state", "--config", str(cfg), "--output-dir", str(tmp_path)]) == 2


def test_missing_model_exits_two(tmp_path):
    assert main(["model-card", "--output-dir", str(tmp_path)]) == 2


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "example1", "J": 3.0}))
    assert main(["state", "--config", str(cfg), "--J", "2", "--output-dir", str(tmp_path)]) == 0
    rep = report(tmp_path, "state")
    assert rep["config"]["J"] == 2.0 and rep["config"]["model"] == "example1"


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("COHSTATES_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["model-card", "--model", "example3"]) == 0
    assert (tmp_path / "env" / "report-model-card.json").exists()
