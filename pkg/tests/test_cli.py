import csv
import io
import json
import subprocess
import sys

import pytest

from berry.cli import main
from berry.experiments import parse_records

CONFIG = """
experiment: clt
energies: [20]
domains:
  - {type: rectangle, x0: 0, y0: 0, width: 1, height: 1}
  - {type: rectangle, x0: 0.5, y0: 0, width: 1, height: 1}
replicates: 3
seed: 1
"""


@pytest.fixture
def cfg(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text(CONFIG)
    return p


def test_simulate_to_file(cfg, tmp_path):
    out = tmp_path / "o.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    recs = parse_records(out.read_text())
    assert len(recs) == 3 * 2
    assert {r.stat for r in recs} == {"length"}


def test_seed_override_changes_output(cfg, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["nodal", "--config", str(cfg), "--out", str(a)])
    main(["nodal", "--config", str(cfg), "--out", str(b), "--seed", "2"])
    assert a.read_text() != b.read_text()


def test_cov_writes_json_to_stdout(cfg, capsys):
    assert main(["cov", "--config", str(cfg)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["summary"]["C"][0][1] == pytest.approx(0.5)
    assert doc["config"]["experiment"] == "clt"


def test_sheet_and_chaos_commands(tmp_path, capsys):
    p = tmp_path / "s.yaml"
    p.write_text("energies: [20]\nreplicates: 2\nsheet_lattice: 2\nkolmogorov_pairs: 3\n")
    assert main(["sheet", "--config", str(p)]) == 0
    assert {r.stat for r in parse_records(capsys.readouterr().out)} == {"X", "dX"}
    assert main(["chaos", "--config", str(p), "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["summary"]["experiment"] == "chaos"


def test_asymptotics_csv(tmp_path, capsys):
    p = tmp_path / "a.yaml"
    p.write_text("energies: [1000]\npairs: ['a1,a1', 'b1,b2']\n")
    assert main(["asymptotics", "--config", str(p)]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [r["pair"] for r in rows] == ["a1,a1", "b1,b2"]
    assert float(rows[0]["ratio"]) == pytest.approx(float(rows[0]["numeric"]) / float(rows[0]["predicted"]))


def test_config_error_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text("energies: [20]\nwavelength: 3\n")
    assert main(["simulate", "--config", str(p)]) == 2
    assert "config error" in capsys.readouterr().err


def test_resolution_error_exit_code(tmp_path):
    p = tmp_path / "hi.yaml"
    p.write_text("energies: [1.0e+9]\n")
    assert main(["simulate", "--config", str(p)]) == 3


def test_io_error_exit_codes(cfg, tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "missing.yaml")]) == 4
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "no" / "x.csv")]) == 4


def test_console_entry_point(cfg):
    proc = subprocess.run([sys.executable, "-m", "berry.cli", "nodal", "--config", str(cfg)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("replicate,seed,E,domain_id,stat,value")
