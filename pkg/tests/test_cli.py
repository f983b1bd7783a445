import json
import os
import subprocess
import sys

import pytest

from trimf.cli import main
from trimf.covers import DomesticBundleId
from trimf.frame import mf_domestic
from trimf.gmf import direct_sum
from trimf.lgroup import WeightTriple
from trimf.poly import FIELDS
from trimf.resources import read_text


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def cli(*argv, env=None):
    e = dict(os.environ)
    e.update(env or {})
    return subprocess.run([sys.executable, "-m", "trimf.cli", *argv], capture_output=True,
                          text=True, env=e, timeout=600)


def test_mf_e6_json(capsys):
    code, out, _ = run(capsys, "mf", "--weights", "2,3,5", "--bundle", "E6", "--field", "q")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["u"]) == 12 and all(len(r) == 12 for r in doc["u"])
    assert doc["symmetric"] and doc["weights"] == [2, 3, 5]


def test_mf_output_round_trips_through_check(capsys, tmp_path):
    path = tmp_path / "e4.json"
    code, _, _ = run(capsys, "mf", "--weights", "2,3,4", "--bundle", "E4@tau=3", "--out",
                     str(path))
    assert code == 0
    code, out, _ = run(capsys, "check", str(path))
    doc = json.loads(out)
    assert code == 0
    assert doc["verification"]["passed"] and doc["symmetric"] and doc["reduced"]
    assert doc["indecomposable"] and doc["end_dim"] == 1


def test_tampered_file_fails_with_coordinates(capsys, tmp_path):
    code, out, _ = run(capsys, "mf", "--weights", "2,3,5", "--bundle", "E3")
    doc = json.loads(out)
    i, j = next((i, j) for i, r in enumerate(doc["u"]) for j, c in enumerate(r) if c)
    term = doc["u"][i][j][0]
    term["coef"] = "1" if term["coef"].startswith("-") else "-" + term["coef"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "check", str(path))
    rep = json.loads(out)["verification"]
    assert code == 1
    assert not rep["passed"]
    assert rep["residual_uv"] and len(rep["residual_uv"][0]["entry"]) == 2


def test_check_parse_error_has_line_and_column(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "weights": [2, 3, 5],\n  "u": [1,,]\n}\n')
    code, _, err = run(capsys, "check", str(path))
    assert code == 2
    assert f"{path}:3:" in err


def test_check_small_characteristic_note(capsys, tmp_path):
    e2 = mf_domestic(DomesticBundleId(WeightTriple(2, 3, 4), "E2"), FIELDS["f3"])
    path = tmp_path / "sum.json"
    path.write_text(json.dumps(direct_sum(e2, e2).to_json()))
    code, out, _ = run(capsys, "check", str(path))
    doc = json.loads(out)
    assert code == 0
    assert doc["indecomposable"] is None
    assert "verified over Q" in doc["note"] and doc["indecomposable_over_Q"] is False
    path.write_text(json.dumps(e2.to_json()))
    code, out, _ = run(capsys, "check", str(path))
    assert code == 0 and json.loads(out)["indecomposable"] is True


def test_rank2_general(capsys):
    code, out, _ = run(capsys, "rank2", "--weights", "4,5,6", "--x", "1,2,3")
    assert code == 0
    assert json.loads(out)["weights"] == [4, 5, 6]
    code, out, _ = run(capsys, "rank2", "--weights", "2,5,7", "--x", "0,1,2", "--symmetric",
                       "--format", "text")
    assert code == 0 and "u =" in out


def test_rank2_out_of_range(capsys):
    code, _, err = run(capsys, "rank2", "--weights", "4,5,6", "--x", "3,2,3")
    assert code == 2 and "dominant" in err


def test_unknown_bundle_lists_valid_names(capsys):
    code, _, err = run(capsys, "mf", "--weights", "2,3,4", "--bundle", "E7")
    assert code == 2
    assert "G2" in err and "F3" in err


def test_usage_errors(capsys):
    assert run(capsys, "mf", "--weights", "2,3", "--bundle", "E2")[0] == 2
    assert run(capsys, "mf", "--weights", "2,3,5", "--bundle", "E2", "--field", "f4")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "quiver", "--weights", "2,3,6")[0] == 2
    assert run(capsys, "verify-paper", "--only", "C11")[0] == 2


def test_cover_and_frame(capsys):
    code, out, _ = run(capsys, "cover", "--weights", "2,3,3", "--bundle", "E3")
    doc = json.loads(out)
    assert code == 0 and doc["rank"] == 3 and len(doc["cover"]) == 6
    code, out, _ = run(capsys, "cover", "--weights", "2,3,5", "--bundle", "E2", "--format",
                       "text")
    assert "pc: O(" in out
    code, out, _ = run(capsys, "frame", "--weights", "2,3,4", "--bundle", "E3")
    assert code == 0 and len(json.loads(out)["U"]) == 6


def test_specialize(capsys):
    code, out, _ = run(capsys, "specialize", "--weights", "2,3,3", "--bundle", "G2",
                       "--limit", "0")
    doc = json.loads(out)
    assert code == 0 and doc["found"] == 1 and doc["solutions"][0]["indecomposable"]


def test_trimf_jobs_env_is_validated(capsys, monkeypatch):
    monkeypatch.setenv("TRIMF_JOBS", "many")
    code, _, err = run(capsys, "specialize", "--weights", "2,3,3", "--bundle", "G2")
    assert code == 2 and "TRIMF_JOBS" in err


def test_quiver_exports(capsys):
    code, out, _ = run(capsys, "quiver", "--weights", "2,3,4", "--window", "8", "--format",
                       "dot")
    assert code == 0 and out.count("[label=") == 64
    code, out, _ = run(capsys, "quiver", "--weights", "2,3,5", "--window=-2:2")
    assert len(json.loads(out)["vertices"]) == 36
    code, out, _ = run(capsys, "quiver", "--weights", "2,3,5", "--window", "0", "--format",
                       "dot")
    assert out.count("\n") == 3
    code, out, _ = run(capsys, "quiver", "--weights", "2,3,5", "--vertex", "E6:2")
    assert json.loads(out)["vertex"]["rank"] == 6


def test_verify_paper_subset_in_process(capsys):
    code, out, _ = run(capsys, "verify-paper", "--only", "C6,C7", "--fields", "q")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert [c["key"] for c in doc["checks"]] == ["C6", "C7"]
    assert all(len(h) == 64 for h in doc["data"].values())
    assert "matrices_2_3_5.json" in doc["data"]


def test_verify_paper_with_corrupted_data_fails(tmp_path):
    doc = json.loads(read_text("matrices_2_3_4.json"))
    m = next(m for m in doc["matrices"] if m["name"] == "E3")
    row = m["cells"][0]
    j = next(j for j, c in enumerate(row) if c != "0")
    row[j] = row[j][1:] if row[j].startswith("-") else "-" + row[j]
    (tmp_path / "matrices_2_3_4.json").write_text(json.dumps(doc))
    res = cli("verify-paper", "--only", "C1,C3", "--data-dir", str(tmp_path), "--jobs", "2")
    assert res.returncode == 1
    rep = json.loads(res.stdout)
    assert not rep["passed"]
    c1 = next(c for c in rep["checks"] if c["key"] == "C1")
    assert any("E3" in f and "[" in f for f in c1["failures"])
    assert rep["data"]["matrices_2_3_4.json"] != json.loads(
        cli("verify-paper", "--only", "C7").stdout)["data"]["matrices_2_3_4.json"]


def test_verify_paper_with_missing_key_is_reported(tmp_path):
    (tmp_path / "covers_2_3_5.json").write_text('{"weights": [2, 3, 5]}')
    res = cli("verify-paper", "--only", "C7", "--data-dir", str(tmp_path), "--format", "text")
    assert res.returncode == 1
    assert "FAIL" in res.stdout and "KeyError" in res.stdout


@pytest.mark.parametrize("jobs", ["1", "3"])
def test_verify_paper_full_run(jobs):
    res = cli("verify-paper", "--format", "text", env={"TRIMF_JOBS": jobs})
    assert res.returncode == 0, res.stdout + res.stderr
    assert res.stdout.count("[PASS]") == 10
