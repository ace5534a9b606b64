import csv
import hashlib
import json
import math
import shutil
from pathlib import Path

import pytest

from l2lab.cli import main

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"


@pytest.fixture
def data(tmp_path):
    for f in DATA.glob("*.json"):
        shutil.copy(f, tmp_path / f.name)
    return tmp_path


def run(data, *argv):
    out = data / "report.json"
    code = main([*map(str, argv), "--output", str(out)])
    report = json.loads(out.read_text()) if out.exists() else None
    if out.exists():
        out.unlink()
    return code, report


def test_kernel_dim_lamplighter(data):
    code, rep = run(data, "kernel-dim", "--matrix", data / "lamplighter_markov.json",
                    "--k-squared", "1", "--p-max", "12")
    assert code == 0 and rep["schema"] == 1
    assert len(rep["result"]["sequence"]["c"]) == 12
    assert rep["result"]["estimate"]["upper_bound"] >= 1 / 3
    h = hashlib.sha256((data / "lamplighter_markov.json").read_bytes()).hexdigest()
    assert rep["inputs"]["matrix"]["sha256"] == h


def test_det_z_minus_2(data):
    code, rep = run(data, "det", "--matrix", data / "z_minus_2.json", "--dim-ker", "0",
                    "--L", "10000")
    assert code == 0
    assert abs(rep["result"]["log_det"] - math.log(2)) < 1e-3
    assert rep["provenance"] == ["user"]


def test_det_uses_oracle_provenance(data):
    code, rep = run(data, "det", "--matrix", data / "z_minus_2.json", "--L", "500")
    assert code == 0 and rep["provenance"] == ["oracle:torus"]


def test_euler(data):
    code, rep = run(data, "euler", "--cells", data / "cells.json")
    assert code == 0 and rep["result"]["chi2"] == "-1/2"


def test_betti_torsion_approx_oracle_ns(data):
    code, rep = run(data, "betti", "--complex", data / "wedge.json", "--p-max", "60")
    assert code == 0 and 1 <= rep["result"]["betti"][1] <= 1.01
    code, rep = run(data, "torsion", "--complex", data / "z_minus_2_complex.json")
    assert code == 0 and abs(rep["result"]["torsion"] - math.log(2)) < 1e-9
    assert rep["provenance"] == ["oracle:torus"]
    code, rep = run(data, "approx", "--matrix", data / "z_minus_1.json", "--tower", "2,4")
    assert code == 0 and [r["value"] for r in rep["result"]["tower"]] == ["1/2", "1/4"]
    code, rep = run(data, "oracle", "--matrix", data / "z2_one_plus_t.json")
    assert code == 0 and rep["result"]["kernel_dim"] == "1/2"
    code, rep = run(data, "ns", "--matrix", data / "z_minus_1.json", "--dim-ker", "0",
                    "--window", "50,400")
    assert code == 0 and abs(rep["result"]["beta_hat"] - 0.5) < 0.02


def test_exact_reports_are_byte_identical(data):
    outs = []
    for name in ("a.json", "b.json"):
        assert main(["kernel-dim", "--matrix", str(data / "z_minus_1.json"), "--p-max", "50",
                     "--output", str(data / name)]) == 0
        outs.append((data / name).read_bytes())
    assert outs[0] == outs[1]


def test_plot_data(data):
    csv_path = data / "plot.csv"
    code, _ = run(data, "det", "--matrix", data / "z_minus_2.json", "--dim-ker", "0",
                  "--L", "20", "--emit-plot-data", csv_path)
    rows = list(csv.reader(csv_path.open()))
    assert code == 0 and rows[0] == ["series", "x", "y"]
    assert {r[0] for r in rows[1:]} == {"c", "S"} and len(rows) == 41


def test_malformed_json_exit_2(data, capsys):
    bad = data / "bad.json"
    bad.write_text('{"group": {"family": "zn", "n": 1}, "rows": 1, "cols": 1, '
                   '"entries": [[[{"coeff": 1, "word": [1, 2]}]]]}')
    code, rep = run(data, "kernel-dim", "--matrix", bad)
    assert code == 2 and rep is None
    assert "/entries/0/0/0/word" in capsys.readouterr().err


def test_missing_file_and_bad_args(data):
    assert run(data, "kernel-dim", "--matrix", data / "missing.json")[0] == 2
    assert main(["kernel-dim"]) == 2
    assert main(["approx", "--matrix", "x.json", "--tower", "0"]) == 2


def test_resource_cap_exit_3(data):
    code, rep = run(data, "kernel-dim", "--matrix", data / "lamplighter_markov.json",
                    "--p-max", "40", "--max-terms", "60")
    assert code == 3 and rep["status"] == "resource_limit"
    assert rep["result"]["partial_sequence"]["c"]


def test_workers_env(data, monkeypatch):
    monkeypatch.setenv("L2LAB_WORKERS", "2")
    code, rep = run(data, "betti", "--complex", data / "torus.json", "--p-max", "20")
    assert code == 0 and rep["result"]["euler_ok"]
