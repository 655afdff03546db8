import csv
import io
import json

import pytest

from charur.cli import EXIT_CONFIG, EXIT_OK, EXIT_TRUNCATION, main
from charur.moments import MomentPair
from charur.mussearch import SearchResult
from charur.urengine import TraceURReport, URReport


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_report_group_cs_auto(capsys):
    code, out, _ = run(
        capsys, "report", "--rep", "su11", "--k", "0.25", "--dim", "auto",
        "--state", "su11_cs", "--zeta", "0.5", "--orders", "1,2,3",
    )
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["schemaVersion"] == 1
    report = URReport.from_dict(data["characteristic"])
    assert report[2].saturated and report[3].saturated and not report[1].saturated
    assert URReport.from_dict(json.loads(json.dumps(report.to_dict()))) == report
    mp = MomentPair.from_dict(data["moments"])
    assert mp.means[2] == pytest.approx(5 / 12)


def test_report_vacuum_trace(capsys):
    code, out, _ = run(
        capsys, "report", "--rep", "fock", "--modes", "1", "--state", "vacuum",
        "--trace-orders", "1,2",
    )
    assert code == EXIT_OK
    trace = TraceURReport.from_dict(json.loads(out)["trace"])
    assert trace[1].saturated and trace[2].saturated


def test_report_bloch_pauli(capsys):
    code, out, _ = run(capsys, "report", "--rep", "su2", "--j", "0.5", "--state", "bloch", "--tau", "0")
    assert code == EXIT_OK
    row = URReport.from_dict(json.loads(out)["characteristic"])[2]
    assert row.lhs == pytest.approx(1 / 16) == row.rhs and row.saturated


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "rep": {"kind": "su11", "weight": 0.5, "dim": 64},
        "state": {"family": "su11_cs", "params": {"zeta": 0.3}},
        "orders": [2],
    }))
    code, out, _ = run(capsys, "report", "--config", str(cfg), "--zeta", "0.4")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["state"]["params"]["zeta"] == 0.4
    assert data["rep"]["dim"] == 64


@pytest.mark.parametrize(
    "config",
    [
        {"rep": {"kind": "su11", "weight": 0.5}, "state": {"family": "su11_cs"}, "bogus": 1},
        {"rep": {"kind": "su11", "weight": 0.5, "extra": 1}, "state": {"family": "su11_cs"}},
        {"rep": {"kind": "su11", "weight": -1}, "state": {"family": "su11_cs"}},
    ],
)
def test_bad_config_exit_code(tmp_path, capsys, config):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(config))
    code, _, err = run(capsys, "report", "--config", str(cfg))
    assert code == EXIT_CONFIG
    assert "config error" in err


def test_unknown_family_exit_code(capsys):
    code, _, _ = run(capsys, "report", "--rep", "su11", "--k", "0.5", "--state", "nope")
    assert code == EXIT_CONFIG


def test_truncation_exit_code(capsys):
    code, _, err = run(
        capsys, "report", "--rep", "su11", "--k", "0.5", "--dim", "16",
        "--state", "su11_cs", "--zeta", "0.9",
    )
    assert code == EXIT_TRUNCATION
    assert "truncation" in err


def test_sweep_csv(capsys):
    code, out, _ = run(
        capsys, "sweep", "--rep", "su11", "--k", "0.25", "--dim", "512",
        "--state", "su11_cs", "--param", "zeta", "--grid", "0:0.8:0.2", "--orders", "2,3",
    )
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0])[:3] == ["zeta", "dim", "tail_mass"]
    assert list(rows[0])[3:7] == ["lhs_2", "rhs_2", "gap_2", "saturated_2"]
    assert list(rows[0])[-1] == "error"
    assert [float(r["zeta"]) for r in rows] == pytest.approx([0, 0.2, 0.4, 0.6, 0.8])
    assert all(r["saturated_2"] == "true" and r["saturated_3"] == "true" for r in rows)
    k3 = [float(r["mean_K3"]) for r in rows]
    assert k3 == sorted(k3)
    # 17 significant digits survive a round trip
    assert float(rows[1]["lhs_2"]).hex() == float(repr(float(rows[1]["lhs_2"]))).hex()


def test_search_is_bit_identical(capsys, tmp_path):
    args = ["search", "--rep", "su2", "--j", "0.5", "--order", "2", "--seed", "42", "--restarts", "2"]
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == EXIT_OK
    assert out1 == out2
    result = SearchResult.from_dict(json.loads(out1)["result"])
    assert result.best_gap < 1e-8


def test_output_dir_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CHARUR_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "report", "--rep", "su2", "--j", "1", "--state", "spin", "--m", "0")
    assert code == EXIT_OK and out == ""
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["command"] == "report"


def test_validate_matrix_suite(capsys):
    code, out, _ = run(capsys, "validate", "--suite", "matrix", "--draws", "200")
    assert code == EXIT_OK
    assert out.startswith("PASS")


def test_validate_writes_json(tmp_path, capsys):
    path = tmp_path / "checks.json"
    code, _, _ = run(capsys, "validate", "--suite", "anchors", "--output", str(path))
    assert code == EXIT_OK
    checks = json.loads(path.read_text())["checks"]
    assert checks[0]["passed"]


def test_validate_unknown_suite(capsys):
    code, _, _ = run(capsys, "validate", "--suite", "nope")
    assert code == EXIT_CONFIG
