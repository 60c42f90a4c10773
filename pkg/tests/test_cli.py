import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from hazmon.cli import SUMMARY_SCHEMA_FILE, main, plan_single_edge

from helpers import posterior_mean

MINIMAL = """\
methods: [straight]
trials: 1
scenario:
  n_known: 4
  n_pseudo: 0
"""

SMALL = """\
experiment: discovery
seed: 5
trials: 2
scenario:
  n_known: 4
  n_unknown: 20
sweep:
  n_pseudo: [0, 1]
"""

PLAN = """\
seed: 3
scenario:
  n_known: 5
  n_pseudo: 1
"""


def write(tmp_path, text, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_minimal_run_writes_one_row(tmp_path):
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, MINIMAL), "--out", str(out), "--no-plots"]) == 0
    rows = read_rows(out / "results.csv")
    assert len(rows) == 1 and rows[0]["method"] == "straight"
    assert rows[0]["schema_version"] == "1" and rows[0]["status"] == "ok"


def test_seed_override_is_deterministic(tmp_path):
    cfg = write(tmp_path, SMALL)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", cfg, "--seed", "42", "--out", str(a), "--no-plots"]) == 0
    assert main(["run", cfg, "--seed", "42", "--out", str(b), "--no-plots", "--jobs", "2"]) == 0
    assert (a / "results.csv").read_bytes() == (b / "results.csv").read_bytes()
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()
    c = tmp_path / "c"
    assert main(["run", cfg, "--seed", "43", "--out", str(c), "--no-plots"]) == 0
    assert (a / "results.csv").read_bytes() != (c / "results.csv").read_bytes()


def test_outputs_are_valid(tmp_path):
    out = tmp_path / "o"
    assert main(["run", write(tmp_path, SMALL), "--out", str(out)]) == 0
    raw = (out / "results.csv").read_bytes()
    assert raw.endswith(b"\r\n") and b"\n" not in raw.replace(b"\r\n", b"")
    rows = list(csv.reader(io.StringIO(raw.decode(), newline="")))
    assert all(len(r) == len(rows[0]) for r in rows)
    assert len(rows) == 1 + 2 * 2 * 3
    summary = json.loads((out / "summary.json").read_text())
    jsonschema.validate(summary, json.loads(SUMMARY_SCHEMA_FILE.read_text()))
    assert json.loads(json.dumps(summary)) == summary
    for name in ("discovered.svg", "routes.svg"):
        assert (out / name).read_text().startswith("<svg")
    assert "task" in (out / "timings.csv").read_text()


def test_env_overrides_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("HAZMON_OUT", str(tmp_path / "env"))
    assert main(["run", write(tmp_path, MINIMAL), "--no-plots"]) == 0
    assert (tmp_path / "env" / "results.csv").exists()


@pytest.mark.parametrize("text,line,fragment", [
    ("trials: 1\nscenario:\n  n_known: 4\n  colour: red\n", 4, "scenario.colour"),
    ("trials: 1\nmethods: [straight, zigzag]\n", 2, "zigzag"),
    ("trials: 0\n", 1, "trials"),
    ("seed: 1\nhazard:\n  p_h: 2.0\n", 2, "p_h"),
    ("sweep:\n  n_known: [5, x]\n", 2, "sweep.n_known"),
    ("trials: [1\n", 2, "invalid YAML"),
    ("scenario:\n  depot: [5000, 1]\n", 2, "depot"),
])
def test_config_errors_are_line_precise(tmp_path, capsys, text, line, fragment):
    cfg = write(tmp_path, text)
    assert main(["run", cfg, "--out", str(tmp_path / "x")]) == 2
    err = capsys.readouterr().err
    assert f"{cfg}:{line}:" in err and fragment in err


def test_bad_arguments_exit_2(tmp_path):
    assert main(["run"]) == 2
    assert main(["plan", write(tmp_path, PLAN)]) == 2


def test_trial_failure_exit_codes(tmp_path):
    # a 100 m budget cannot reach nodes in a 1 km domain: routing fails
    cfg = write(tmp_path, "methods: [straight]\nscenario:\n  total_budget: 100\n  n_known: 3\n")
    assert main(["run", cfg, "--out", str(tmp_path / "a"), "--no-plots"]) == 3
    assert main(["run", cfg, "--out", str(tmp_path / "b"), "--no-plots", "--keep-going"]) == 0
    rows = read_rows(tmp_path / "b" / "results.csv")
    assert rows and all(r["status"] == "error" for r in rows)


@pytest.fixture(scope="module")
def planned(tmp_path_factory):
    d = tmp_path_factory.mktemp("plan")
    cfg = d / "sc.yaml"
    cfg.write_text(PLAN)
    return cfg, plan_single_edge(cfg, 1)


def test_plan_gammas_match_recomputation(planned):
    _, out = planned
    g = out["gammas"]
    assert g["optimized"] <= g["lawnmower"]
    for name, path in out["paths"].items():
        assert g[name] == pytest.approx(posterior_mean(path, out["problems"][name]), abs=1e-9)


def test_plan_command(planned, tmp_path, capsys):
    cfg, out = planned
    assert main(["plan", str(cfg), "--edge", "1", "--out", str(tmp_path)]) == 0
    printed = dict(line.split(" gamma=") for line in capsys.readouterr().out.splitlines())
    for name, g in out["gammas"].items():
        assert float(printed[name.ljust(10)]) == pytest.approx(g, abs=1e-12)
    assert (tmp_path / "plan_edge1.svg").exists()
    assert main(["plan", str(cfg), "--edge", "999"]) == 2
    assert main(["plan", str(cfg), "--edge", "-1"]) == 2


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "hazmon", "run", write(tmp_path, MINIMAL),
                          "--out", str(tmp_path / "m"), "--no-plots"], capture_output=True)
    assert res.returncode == 0, res.stderr
