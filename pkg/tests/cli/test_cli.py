# Standard Library
import csv
import json
import os
import subprocess
import sys

# Third Party
import numpy as np
import pytest

# First Party
from mdfocus.calibration.thresholds import ThresholdPlan, arl_threshold
from mdfocus.cli import EXIT_CONFIG, EXIT_DATA, EXIT_INTERNAL, EXIT_OK, run


def _write(out_dir, name, text):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w") as f:
        f.write(text)
    return path


def _config(out_dir, rows, p=1, threshold=2.0, statistics=("dense",), **extra):
    data = _write(out_dir, "data.csv", "\n".join(",".join(str(v) for v in r) for r in rows))
    params = {
        "model": {"family": "gaussian_mean", "p": p},
        "statistics": list(statistics),
        "prechange": {"known": [0.0] * p},
        "threshold_plan": {"thresholds": {name: threshold for name in statistics}},
        "input": data,
        "output": os.path.join(out_dir, "out.jsonl"),
        "format": "jsonl",
    }
    params.update(extra)
    return _write(out_dir, "config.json", json.dumps(params))


def _records(out_dir):
    with open(os.path.join(out_dir, "out.jsonl")) as f:
        return [json.loads(line) for line in f if line.strip()]


def _csv(path):
    with open(path) as f:
        return list(csv.reader(f))


def test_detect_stops(out_dir):
    config = _config(out_dir, [[1], [1]])
    assert run(["detect", "--config", config]) == EXIT_OK
    assert _records(out_dir)[-1] == {
        "stopped": True,
        "n": 2,
        "stat": "dense",
        "tau_hat": 0,
        "value": pytest.approx(2.0),
    }


def test_detect_runs_out_of_rows(out_dir):
    config = _config(out_dir, [[0], [0], [0]], threshold=1.0)
    assert run(["detect", "--config", config]) == EXIT_OK
    record = _records(out_dir)[-1]
    assert record["stopped"] is False
    assert record["n"] == 3


def test_detect_trace(out_dir):
    config = _config(out_dir, [[0], [0], [0]], threshold=1.0)
    assert run(["detect", "--config", config, "--trace"]) == EXIT_OK
    records = _records(out_dir)
    assert "config" in records[0]
    assert len(records) == 5


def test_engines_agree(out_dir, rng):
    stream = np.vstack([rng.normal(size=(300, 2)), rng.normal(size=(100, 2)) + 1.0])
    statistics = ["dense", "ranked:1"]
    config = _config(out_dir, stream.tolist(), p=2, threshold=40.0, statistics=statistics)
    decisions = []
    for engine in ("exact", "dyadic"):
        assert run(["detect", "--config", config, "--engine", engine]) == EXIT_OK
        decisions.append(_records(out_dir)[-1])
    exact, dyadic = decisions
    assert exact["stopped"]
    assert dyadic["n"] == exact["n"] and dyadic["stat"] == exact["stat"]
    assert dyadic["value"] == pytest.approx(exact["value"], rel=1e-9)


def test_detect_errors(out_dir):
    assert run(["detect", "--config", os.path.join(out_dir, "missing.json")]) == EXIT_CONFIG
    config = _config(out_dir, [[1, 2]])
    assert run(["detect", "--config", config]) == EXIT_DATA
    config = _config(out_dir, [[0]], statistics=["ranked:2"])
    assert run(["detect", "--config", config]) == EXIT_CONFIG
    assert run([]) == EXIT_CONFIG


def test_calibrate(out_dir):
    config = _config(out_dir, [[0]])
    plan_path = os.path.join(out_dir, "plan.json")
    args = ["calibrate", "analytic-arl", "--config", config, "--output", plan_path]
    assert run(args + ["--gamma", "5000"]) == EXIT_OK
    with open(plan_path) as f:
        plan = ThresholdPlan.from_json(f.read())
    assert plan.value("dense", 1) == pytest.approx(arl_threshold(1, 1, 5000))
    assert run(args) == EXIT_CONFIG


def test_oracle(out_dir):
    path = os.path.join(out_dir, "oracle.csv")
    os.makedirs(out_dir, exist_ok=True)
    assert run(["oracle", "--p", "1", "2", "--n", "10", "100", "--output", path]) == EXIT_OK
    rows = _csv(path)
    assert rows[0] == ["n", "p", "E_faces", "E_vertices"]
    assert len(rows) == 5


def test_experiment(out_dir):
    entry = {"id": "h", "model": {"family": "gaussian_mean", "p": 1}, "n": 20, "seed": 1}
    grid = _write(out_dir, "grid.json", json.dumps({"scenarios": [entry]}))
    records = os.path.join(out_dir, "records.csv")
    summary = os.path.join(out_dir, "summary.csv")
    args = ["experiment", "hullcount", "--grid", grid, "--replicates", "2"]
    assert run(args + ["--output", records, "--summary", summary]) == EXIT_OK
    assert len(_csv(records)) == 5

    failing = dict(entry, statistics=["ranked:3"])
    grid = _write(out_dir, "grid.json", json.dumps({"scenarios": [failing]}))
    args = ["experiment", "arl", "--grid", grid, "--replicates", "2"]
    assert run(args + ["--output", records, "--summary", summary]) == EXIT_INTERNAL

    grid = _write(out_dir, "grid.json", json.dumps({"scenarios": []}))
    assert run(["experiment", "arl", "--grid", grid]) == EXIT_CONFIG


def test_edetect(out_dir):
    scores = _write(out_dir, "scores.csv", "\n".join(["3", "-2", "5", "1", "-4"]))
    path = os.path.join(out_dir, "edetect.csv")
    base = ["edetect", "--preset", "winning-rate", "--output", path]
    assert run(base + [scores, "--lam", "0.2"]) == EXIT_OK
    rows = _csv(path)
    assert rows[0] == ["n", "vertices", "candidates", "value", "tau"]
    assert len(rows) == 6
    assert rows[1][:3] == ["1", "1", "0"]

    assert run(base + ["--simulate", "uniform", "--length", "30", "--seed", "1"]) == EXIT_OK
    assert len(_csv(path)) == 31
    assert run(base + ["--simulate", "resample", "--length", "30", scores]) == EXIT_OK
    assert len(_csv(path)) == 31
    assert run(base + ["--simulate", "resample"]) == EXIT_CONFIG
    assert run(base) == EXIT_CONFIG


def _run_console(args):
    env = dict(os.environ, MDFOCUS_LOG_LEVEL="debug", PYTHONPATH=os.getcwd())
    return subprocess.run(
        [sys.executable, "-m", "mdfocus.cli"] + args,
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        universal_newlines=True,
        env=env,
        check=True,
    )


def test_stdout_only_carries_records(out_dir):
    config = _config(out_dir, [[0], [1], [3], [3]], threshold=5.0, output="-")
    result = _run_console(["detect", "--config", config, "--trace"])
    records = [json.loads(line) for line in result.stdout.splitlines()]
    assert "config" in records[0]
    assert records[-1]["stopped"] is True
    assert "Loaded run config" in result.stderr

    result = _run_console(["oracle", "--p", "1", "--n", "10", "100"])
    rows = list(csv.reader(result.stdout.splitlines()))
    assert rows[0] == ["n", "p", "E_faces", "E_vertices"]
    assert len(rows) == 3
