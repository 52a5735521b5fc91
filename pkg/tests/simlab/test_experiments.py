# Standard Library
import csv
import os

# Third Party
import pytest

# First Party
from mdfocus.calibration.bounds import dd_bound
from mdfocus.calibration.thresholds import analytic_arl_plan
from mdfocus.detectors.statistics import Statistic
from mdfocus.exceptions import ConfigError, WorkerFailure
from mdfocus.simlab.experiments import (
    RECORD_HEADER,
    RUNTIME_SLOPE_LIMIT,
    SUMMARY_HEADER,
    run_experiment,
)


def _entry(scenario_id, p=1, n=64, **kwargs):
    entry = {"id": scenario_id, "model": {"family": "gaussian_mean", "p": p}, "n": n}
    entry.update(kwargs)
    return entry


def _summary(result, metric):
    (summary,) = [s for s in result.summaries if s["metric"] == metric]
    return summary


def test_hullcount_records():
    result = run_experiment("hullcount", [_entry("h1", seed=3)], replicates=10)
    assert result.complete
    assert len(result.records) == 20
    vertices = [r.value for r in result.records if r.stat == "vertices"]
    faces = [r.value for r in result.records if r.stat == "faces"]
    # a polygon has as many edges as vertices
    assert vertices == faces
    summary = _summary(result, "vertices")
    assert summary["replicates"] == 10
    assert summary["reference"] > 2


def test_workers_do_not_change_records():
    grid = [_entry("h1", seed=3), _entry("h2", p=3, n=40, seed=4)]
    serial = run_experiment("hullcount", grid, replicates=4)
    pooled = run_experiment("hullcount", grid, replicates=4, workers=2)
    assert [r.row() for r in serial.records] == [r.row() for r in pooled.records]
    # faces are only counted up to three lifted dimensions
    assert all(r.stat == "vertices" for r in serial.records if r.scenario == "h2")


def test_arl_and_falsealarm():
    arl = run_experiment("arl", [_entry("a1", n=200)], replicates=5, seed=11)
    assert arl.complete
    assert all(r.detection_time is None or r.detection_time <= 200 for r in arl.records)
    assert 0 <= _summary(arl, "stopped_fraction")["value"] <= 1
    assert _summary(arl, "run_length")["reference"] == 5000

    fa = run_experiment("falsealarm", [_entry("f1", n=100, alpha=0.5)], replicates=5, seed=2)
    rate = _summary(fa, "false_alarm_rate")
    assert 0 <= rate["value"] <= 1
    assert rate["reference"] == 0.5


def test_detection_delay():
    entry = _entry("d1", p=3, n=300, changepoint=100, magnitude=16.0, gamma=1000, seed=8)
    result = run_experiment("add", [entry], replicates=5)
    delays = [r.delay for r in result.records if r.delay is not None]
    assert delays and all(d > 0 for d in delays)
    summary = _summary(result, "delay")
    assert summary["reference"] > 0


def test_runtime_records():
    entry = _entry("r1", n=100, n_values=[100, 200])
    result = run_experiment("runtime_slope", [entry], replicates=2, seed=1)
    assert sorted(set(r.n for r in result.records)) == [100, 200]
    assert all(r.step_time > 0 and r.candidates > 0 for r in result.records)
    assert _summary(result, "slope")["reference"] == RUNTIME_SLOPE_LIMIT


def test_failed_replicates_are_collected():
    entry = _entry("bad", statistics=["ranked:5"])
    result = run_experiment("arl", [entry], replicates=3, seed=0)
    assert not result.complete
    assert len(result.failures) == 3
    assert all(isinstance(f, WorkerFailure) for f in result.failures)
    assert _summary(result, "run_length")["failures"] == 3


def test_experiment_errors():
    with pytest.raises(ConfigError):
        run_experiment("coverage", [_entry("x")], replicates=1)
    with pytest.raises(ConfigError):
        run_experiment("arl", [_entry("x")], replicates=0)
    with pytest.raises(ConfigError):
        run_experiment("arl", [_entry("x", rate=3)], replicates=1)


def test_write(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    result = run_experiment("hullcount", [_entry("h1", n=20, seed=1)], replicates=2)
    records = os.path.join(out_dir, "records.csv")
    summary = os.path.join(out_dir, "summary.csv")
    result.write(records, summary)
    with open(records) as f:
        rows = list(csv.reader(f))
    assert rows[0] == RECORD_HEADER
    assert len(rows) == 5
    with open(summary) as f:
        assert next(csv.reader(f)) == SUMMARY_HEADER


@pytest.mark.slow
@pytest.mark.parametrize("n", [2 ** 8, 2 ** 10, 2 ** 12])
@pytest.mark.parametrize("p", [1, 2, 3])
def test_vertex_counts_match_expectation(p, n):
    entry = _entry("h", p=p, n=n)
    result = run_experiment("hullcount", [entry], replicates=200, workers=4, seed=21)
    summary = _summary(result, "vertices")
    assert abs(summary["value"] - summary["reference"]) <= 3 * summary["se"]


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [0.2, 0.5])
@pytest.mark.parametrize("p", [1, 3])
def test_false_alarm_rate_is_controlled(alpha, p):
    statistics = ["dense", "ranked:1"] if p > 1 else ["dense"]
    entry = _entry("fa", p=p, n=1000, alpha=alpha, statistics=statistics)
    result = run_experiment("falsealarm", [entry], replicates=500, workers=4, seed=17)
    rate = _summary(result, "false_alarm_rate")
    assert rate["value"] <= alpha + 3 * (alpha * (1 - alpha) / 500) ** 0.5


@pytest.mark.slow
def test_runtime_grows_slower_than_quadratically():
    entry = _entry("rt", p=2, n=1024, n_values=[2 ** k for k in range(10, 15)])
    result = run_experiment("runtime_slope", [entry], replicates=3, seed=5)
    assert _summary(result, "slope")["value"] <= RUNTIME_SLOPE_LIMIT


@pytest.mark.slow
def test_delays_stay_within_high_probability_bound():
    entry = _entry("dd", p=3, n=400, changepoint=200, magnitude=4.0, gamma=5000)
    result = run_experiment("add", [entry], replicates=300, workers=4, seed=23)
    assert result.complete
    c = analytic_arl_plan([Statistic.dense()], 3, 5000).value("dense", 1)
    bound = dd_bound(c, 3, 4.0, alpha=0.1)
    within = [r for r in result.records if r.delay is not None and r.delay <= bound]
    assert len(within) >= 0.9 * 300
