import csv
import json
import subprocess
import sys

import pytest

from coarselab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_growth_to_file(tmp_path, capsys):
    out = tmp_path / "g.json"
    code, _, _ = run(capsys, "growth", "grid:2", "--n", "50", "--out", str(out))
    assert code == 0
    payload = json.loads(out.read_text())
    assert len(payload["series"]) == 51
    assert payload["graph"] == "grid:2" and payload["basepoint"] == "b:0,0"
    log = json.loads((tmp_path / "g.json.log").read_text())
    assert "started" in log and "started" not in payload


def test_qisearch_refutes_tripod(capsys):
    code, out, _ = run(
        capsys, "qisearch", "--domain", "tripod:4", "--codomain", "grid:1", "--L", "1", "--A", "1", "--pin", "center:0"
    )
    assert code == 0
    cert = json.loads(out)["certificate"]
    assert cert["outcome"] == "refuted" and cert["nodes"] > 0


def test_qisearch_found_includes_assignment(capsys):
    code, out, _ = run(
        capsys, "qisearch", "--domain", "interval:3", "--codomain", "grid:1", "--L", "1", "--A", "0", "--pin", "0:0"
    )
    assert code == 0
    cert = json.loads(out)["certificate"]
    assert cert["outcome"] == "found" and len(cert["assignment"]) == 7 and cert["pins"] == [["b:0", "b:0"]]


def test_qisearch_ball_domain_into_decorated(capsys):
    code, out, _ = run(
        capsys,
        "qisearch",
        "--domain", "ball:grid:1@0/3",
        "--codomain", "decorate:grid:1:alpha=1",
        "--L", "1", "--A", "1",
        "--pin", "0:81",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["base_proximity"]["pass"]


def test_sandwich_pass(tmp_path, capsys):
    csv_path = tmp_path / "s.csv"
    gp = tmp_path / "s.gp"
    code, out, _ = run(
        capsys, "sandwich", "--base", "grid:2", "--alpha", "0.5", "--n", "60", "--csv", str(csv_path), "--gnuplot", str(gp)
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["sandwich"] == {"pass": True, "first_violation": None}
    rows = list(csv.reader(csv_path.open()))
    assert rows[0] == ["n", "base", "decorated", "twice_base"] and len(rows) == 62
    script = gp.read_text()
    assert "$data << EOD" in script and script.rstrip().splitlines()[-1].startswith("plot ")


def test_threshold_prints_integer(tmp_path, capsys):
    rec = tmp_path / "t.json"
    code, out, _ = run(capsys, "threshold", "--alpha", "0.5", "--beta", "1", "--out", str(rec))
    assert code == 0 and out == "21\n"
    audit = json.loads(rec.read_text())
    assert audit["certified_window"] == [21, 210]
    assert audit["samples"][0] == {"x": 20, "g_beta": 3, "rhs": "3", "holds": False}


def test_census_and_ratio(capsys):
    code, out, _ = run(capsys, "census", "--n", "4", "--L", "1", "--A", "1")
    assert code == 0 and json.loads(out)["order_violations"] == 0
    code, out, _ = run(capsys, "ratio", "--alpha", "0.5", "--beta", "1", "--xs", "e^4,e^16,e^36")
    assert code == 0 and json.loads(out)["strictly_decreasing"]


def test_chain_and_embed(capsys):
    code, out, _ = run(capsys, "chain", "ladder", "--r", "1")
    assert code == 0 and json.loads(out)["audit"]["pass"]
    code, out, _ = run(capsys, "embed-tree", "decorate:grid:1:alpha=1", "--radius", "12")
    assert code == 0 and json.loads(out)["violations"] == []


def test_refute_ct(capsys):
    code, out, _ = run(capsys, "refute-ct", "decorate:grid:1:alpha=1", "--x", "3025", "--y", "2970", "--K", "1", "--R", "4")
    assert code == 0 and json.loads(out)["result"]["outcome"] == "refuted"
    code, out, _ = run(
        capsys, "refute-ct", "decorate:grid:1:alpha=1", "--x", "3025", "--y", "2970", "--K", "1", "--R", "4", "--budget", "30"
    )
    assert code == 3 and json.loads(out)["result"]["outcome"] == "inconclusive"


def test_cubicalize_audit_is_seeded(capsys):
    a = run(capsys, "cubicalize-audit", "grid:2", "--seed", "3")
    b = run(capsys, "cubicalize-audit", "grid:2", "--seed", "3")
    assert a == b and a[0] == 0
    payload = json.loads(a[1])
    assert payload["max_degree"] <= 3 and len(payload["pairs"]) == 50


def test_export_snapshot(capsys):
    code, out, _ = run(capsys, "export-snapshot", "grid:1", "--radius", "2")
    assert code == 0 and out.splitlines()[0] == "# center=b:0 radius=2"
    assert len(out.splitlines()) == 5


def test_decorate_info(capsys):
    code, out, _ = run(capsys, "decorate-info", "--alpha", "1", "--m-max", "4")
    table = json.loads(out)["table"]
    assert [row["tip_distance"] for row in table] == [1, 5, 11, 18]


def test_ends_report(capsys):
    code, out, _ = run(capsys, "ends", "grid:1", "--r", "1,2", "--R-max", "20")
    payload = json.loads(out)
    assert code == 0
    assert payload["stabilized"]["1"]["count"] == 2
    assert {"r", "R", "count"} == set(payload["ends"][0])


def test_usage_errors(capsys):
    code, _, err = run(capsys, "growth", "nope:3", "--n", "3")
    assert code == 2 and "usage" in err
    code, _, err = run(capsys, "frobnicate")
    assert code == 2 and "usage" in err
    code, _, err = run(capsys, "qisearch", "--domain", "tripod:2", "--codomain", "grid:1", "--L", "1", "--A", "1", "--pin", "9,9:0")
    assert code == 2


def test_budget_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("COARSELAB_BUDGET", "10")
    code, _, err = run(
        capsys, "qisearch", "--domain", "tripod:4", "--codomain", "grid:1", "--L", "1", "--A", "1", "--pin", "center:0"
    )
    assert code == 3 and "budget" in err


def test_violation_exit_code(capsys):
    # grid:2 is one-ended, so the chain construction must fail as a property violation
    code, _, err = run(capsys, "chain", "grid:2", "--r", "1", "--k-min", "-1", "--k-max", "1")
    assert code == 1 and "horizon components" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["ends", "tree:3", "--r", "1,2,3", "--R-max", "11"],
        ["qisearch", "--domain", "tripod:4", "--codomain", "grid:1", "--L", "1", "--A", "1", "--pin", "center:0"],
        ["refute-ct", "grid:1", "--x", "0", "--y", "5", "--K", "1", "--R", "4"],
    ],
)
def test_thread_count_does_not_change_payload(tmp_path, argv):
    outs = []
    for threads in (1, 8):
        path = tmp_path / f"out{threads}.json"
        assert main(["--threads", str(threads)] + argv + ["--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "coarselab", "growth", "grid:1", "--n", "3"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["series"] == [1, 3, 5, 7]
