"""
Experiment harness.

An experiment runs every scenario of a grid for a number of replicates and summarises the
results. Grid entries are scenario configs (see mdfocus.simlab.scenarios) with optional
experiment keys:

    statistics      statistic names, default ["dense"]
    prechange       prechange block, default known zero parameter
    engine          exact, dyadic or approx, default exact
    engine_params   as in the run config
    gamma           ARL used to calibrate fixed thresholds (arl, add)
    alpha           false-alarm probability (falsealarm)
    n_values        stream lengths (runtime_slope)

Kinds:

    hullcount      vertices of the hull of P(0), ..., P(n-1), compared with their expectation
    runtime_slope  step time against n, summarised by the slope of the log-log fit
    arl            run length without change under ARL-calibrated thresholds
    add            detection delay after the changepoint, compared with the delay bound
    falsealarm     frequency of ever stopping under time-varying thresholds
"""

# Standard Library
import math
import multiprocessing
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

# Third Party
import numpy as np
from scipy import stats

# First Party
from mdfocus.calibration.bounds import add_bound
from mdfocus.calibration.expectation import MAX_DIMENSION, expected_counts
from mdfocus.calibration.thresholds import analytic_arl_plan, false_alarm_plan
from mdfocus.core.access_layer.file import write_csv
from mdfocus.core.config_constants import RUNTIME_WARMUP_STEPS
from mdfocus.core.hull import hull_face_count
from mdfocus.core.logger import get_logger
from mdfocus.core.modes import EngineKind, StatKind
from mdfocus.core.run_config import build_engine
from mdfocus.detectors.decision import run_detection
from mdfocus.detectors.statistics import Prechange, StatConfig
from mdfocus.exceptions import ConfigError, WorkerFailure
from mdfocus.simlab.oracle import brute_force_hull, lifted_points
from mdfocus.simlab.scenarios import StreamScenario, generate, make_rng

logger = get_logger()

HULLCOUNT = "hullcount"
RUNTIME_SLOPE = "runtime_slope"
ARL = "arl"
ADD = "add"
FALSEALARM = "falsealarm"
ALLOWED_KINDS = [HULLCOUNT, RUNTIME_SLOPE, ARL, ADD, FALSEALARM]

EXPERIMENT_KEYS = [
    "statistics",
    "prechange",
    "engine",
    "engine_params",
    "gamma",
    "alpha",
    "n_values",
]
DEFAULT_GAMMA = 5000
DEFAULT_FA_ALPHA = 0.1
RUNTIME_SLOPE_LIMIT = 1.3

RECORD_HEADER = [
    "scenario",
    "replicate",
    "seed",
    "n",
    "stat",
    "value",
    "detection_time",
    "delay",
    "candidates",
    "step_time",
]
SUMMARY_HEADER = [
    "scenario",
    "kind",
    "metric",
    "value",
    "se",
    "reference",
    "replicates",
    "failures",
]


class ExperimentRecord:
    """One measurement of one replicate."""

    __slots__ = RECORD_HEADER

    def __init__(
        self,
        scenario,
        replicate,
        seed,
        n,
        stat,
        value=None,
        detection_time=None,
        delay=None,
        candidates=None,
        step_time=None,
    ):
        self.scenario = scenario
        self.replicate = replicate
        self.seed = seed
        self.n = n
        self.stat = stat
        self.value = value
        self.detection_time = detection_time
        self.delay = delay
        self.candidates = candidates
        self.step_time = step_time

    def row(self) -> List[Any]:
        return ["" if getattr(self, k) is None else getattr(self, k) for k in RECORD_HEADER]

    def __repr__(self):
        return f"<class ExperimentRecord: {dict(zip(RECORD_HEADER, self.row()))}>"


class ExperimentResult:
    def __init__(self, kind, records, summaries, failures):
        self.kind = kind
        self.records = records
        self.summaries = summaries
        self.failures = failures

    @property
    def complete(self) -> bool:
        return len(self.failures) == 0

    def write(self, records_path, summary_path=None):
        write_csv(records_path, RECORD_HEADER, (r.row() for r in self.records))
        if summary_path is not None:
            rows = ([s.get(k, "") for k in SUMMARY_HEADER] for s in self.summaries)
            write_csv(summary_path, SUMMARY_HEADER, rows)

    def __repr__(self):
        return (
            f"<class ExperimentResult: kind={self.kind}, records={len(self.records)}, "
            f"failures={len(self.failures)}>"
        )


def split_entry(entry: Dict[str, Any]):
    scenario = StreamScenario.from_dict(
        {k: v for k, v in entry.items() if k not in EXPERIMENT_KEYS}
    )
    extras = {k: v for k, v in entry.items() if k in EXPERIMENT_KEYS}
    return scenario, extras


def _stat_config(scenario, extras) -> StatConfig:
    return StatConfig.from_dict(
        {
            "statistics": extras.get("statistics", ["dense"]),
            "prechange": extras.get("prechange", {"known": scenario.pre.tolist()}),
        }
    )


def _engine(scenario, extras, stat_config):
    return build_engine(
        scenario.model,
        stat_config,
        EngineKind(extras.get("engine", EngineKind.EXACT.value)),
        extras.get("engine_params"),
    )


def _hullcount(scenario, extras, replicate, seed):
    # n points P(0), ..., P(n-1) need n - 1 observations
    stream = generate(scenario.with_seed(seed), make_rng(seed, replicate))[: scenario.n - 1]
    labels = brute_force_hull(stream, scenario.n, known=True, method="auto")
    sid, n = scenario.scenario_id, scenario.n
    records = [ExperimentRecord(sid, replicate, seed, n, "vertices", len(labels))]
    if scenario.model.d_nat <= 2:
        faces = hull_face_count(lifted_points(stream, np.arange(n)))
        records.append(ExperimentRecord(sid, replicate, seed, n, "faces", faces))
    return records


def _runtime(scenario, extras, replicate, seed):
    stat_config = _stat_config(scenario, extras)
    records = []
    for n in extras.get("n_values", [scenario.n]):
        sized = StreamScenario.from_dict(
            dict(scenario.to_json_dict(), n=n + RUNTIME_WARMUP_STEPS, changepoint=None)
        )
        stream = generate(sized, make_rng(seed, replicate))
        with _engine(sized, extras, stat_config) as engine:
            for row in stream[:RUNTIME_WARMUP_STEPS]:
                engine.step(row)
            start = time.perf_counter()
            for row in stream[RUNTIME_WARMUP_STEPS:]:
                engine.step(row)
            elapsed = time.perf_counter() - start
        records.append(
            ExperimentRecord(
                scenario.scenario_id,
                replicate,
                seed,
                n,
                "runtime",
                elapsed,
                candidates=engine.n_candidates,
                step_time=elapsed / n,
            )
        )
    return records


def _detection(scenario, extras, replicate, seed, plan):
    stat_config = _stat_config(scenario, extras)
    stream = generate(scenario, make_rng(seed, replicate))
    with _engine(scenario, extras, stat_config) as engine:
        start = time.perf_counter()
        decision = run_detection(engine, stream, plan, natural=True)
        elapsed = time.perf_counter() - start
    detection_time = decision.n if decision.stopped else None
    delay = None
    if detection_time is not None and scenario.has_change and detection_time > scenario.changepoint:
        delay = detection_time - scenario.changepoint
    return [
        ExperimentRecord(
            scenario.scenario_id,
            replicate,
            seed,
            scenario.n,
            decision.stat or "none",
            1.0 if decision.stopped else 0.0,
            detection_time=detection_time,
            delay=delay,
            candidates=engine.n_candidates,
            step_time=elapsed / max(engine.n, 1),
        )
    ]


def _plan(kind, scenario, extras):
    statistics = _stat_config(scenario, extras).statistics
    if kind == FALSEALARM:
        return false_alarm_plan(statistics, scenario.model.p, extras.get("alpha", DEFAULT_FA_ALPHA))
    return analytic_arl_plan(statistics, scenario.model.p, extras.get("gamma", DEFAULT_GAMMA))


def run_replicate(kind: str, entry: Dict[str, Any], replicate: int, seed: Optional[int]):
    """Records of one replicate of one grid entry; runs in the worker processes."""
    scenario, extras = split_entry(entry)
    if kind == HULLCOUNT:
        return _hullcount(scenario, extras, replicate, seed)
    if kind == RUNTIME_SLOPE:
        return _runtime(scenario, extras, replicate, seed)
    return _detection(scenario, extras, replicate, seed, _plan(kind, scenario, extras))


def _run_task(task):
    kind, entry, replicate, seed = task
    try:
        return run_replicate(kind, entry, replicate, seed)
    except Exception as e:
        return WorkerFailure(entry.get("id", "scenario"), replicate, f"{type(e).__name__}: {e}")


def _mean_se(values):
    values = np.asarray(values, dtype=float)
    if values.shape[0] == 0:
        return float("nan"), float("nan")
    if values.shape[0] == 1:
        return float(values[0]), float("nan")
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.shape[0]))


def _summary(scenario, kind, failures, metric, value, se="", reference="", replicates=0):
    return {
        "scenario": scenario.scenario_id,
        "kind": kind,
        "metric": metric,
        "value": value,
        "se": se,
        "reference": reference,
        "replicates": replicates,
        "failures": failures,
    }


def _summarise(kind, entry, records, failures) -> List[Dict[str, Any]]:
    scenario, extras = split_entry(entry)
    count = len(records)
    out = []
    if kind == HULLCOUNT:
        p = scenario.model.d_nat
        for metric, slot in (("vertices", 1), ("faces", 0)):
            values = [r.value for r in records if r.stat == metric]
            if not values:
                continue
            mean, se = _mean_se(values)
            reference = expected_counts(scenario.n, p)[slot] if p <= MAX_DIMENSION else ""
            out.append(_summary(scenario, kind, failures, metric, mean, se, reference, len(values)))
    elif kind == RUNTIME_SLOPE:
        sizes = sorted(set(r.n for r in records))
        means = [float(np.mean([r.value for r in records if r.n == n])) for n in sizes]
        if len(sizes) >= 2:
            kept = [np.mean([r.candidates for r in records if r.n == n]) for n in sizes]
            fits = [("slope", means, RUNTIME_SLOPE_LIMIT), ("candidate_slope", kept, "")]
            for metric, ys, limit in fits:
                fit = stats.linregress(np.log(sizes), np.log(ys))
                out.append(
                    _summary(scenario, kind, failures, metric, fit.slope, fit.stderr, limit, count)
                )
        for n, mean in zip(sizes, means):
            out.append(_summary(scenario, kind, failures, f"runtime@{n}", mean, replicates=count))
    elif kind == FALSEALARM:
        mean, se = _mean_se([r.value for r in records])
        alpha = extras.get("alpha", DEFAULT_FA_ALPHA)
        out.append(_summary(scenario, kind, failures, "false_alarm_rate", mean, se, alpha, count))
    elif kind == ARL:
        # streams without a stop are censored at the horizon
        lengths = [scenario.n if r.detection_time is None else r.detection_time for r in records]
        mean, se = _mean_se(lengths)
        gamma = extras.get("gamma", DEFAULT_GAMMA)
        out.append(_summary(scenario, kind, failures, "run_length", mean, se, gamma, count))
        stopped = sum(1 for r in records if r.detection_time is not None) / max(count, 1)
        out.append(
            _summary(scenario, kind, failures, "stopped_fraction", stopped, replicates=count)
        )
    else:
        delays = [r.delay for r in records if r.delay is not None]
        mean, se = _mean_se(delays)
        reference = ""
        dense = [s for s in _stat_config(scenario, extras).statistics if s.kind == StatKind.DENSE]
        if dense and scenario.has_change:
            plan = _plan(kind, scenario, extras)
            reference = add_bound(plan.value(dense[0].name, scenario.n), scenario.magnitude)
        out.append(_summary(scenario, kind, failures, "delay", mean, se, reference, len(delays)))
        missed = count - len(delays)
        out.append(_summary(scenario, kind, failures, "missed_or_early", missed, replicates=count))
    return out


def _pool_context():
    if sys.platform == "darwin":
        # fork is unsafe on macOS
        return multiprocessing.get_context("spawn")
    return multiprocessing.get_context()


def run_experiment(
    kind: str,
    grid: Sequence[Dict[str, Any]],
    replicates: int,
    workers: int = 1,
    seed: Optional[int] = None,
) -> ExperimentResult:
    """Runs every grid entry for `replicates` replicates, on `workers` processes.

    Each entry is seeded with its own "seed" or else `seed`; replicate r uses make_rng(seed, r).
    Failed replicates are collected as WorkerFailure and the summaries cover the rest.
    """
    if kind not in ALLOWED_KINDS:
        raise ConfigError(f"experiment kind {kind} must be one of " + ",".join(ALLOWED_KINDS))
    if replicates < 1:
        raise ConfigError(f"replicates={replicates} must be positive")
    for entry in grid:
        split_entry(entry)
    tasks = [
        (kind, entry, r, entry.get("seed", seed)) for entry in grid for r in range(replicates)
    ]
    logger.info(f"Started {kind} experiment: {len(grid)} scenarios x {replicates} replicates")
    if workers > 1 and len(tasks) > 1:
        with _pool_context().Pool(workers) as pool:
            results = pool.map(_run_task, tasks)
    else:
        results = [_run_task(task) for task in tasks]

    records, failures, summaries = [], [], []
    for i, entry in enumerate(grid):
        chunk = results[i * replicates : (i + 1) * replicates]
        entry_records = []
        entry_failures = 0
        for result in chunk:
            if isinstance(result, WorkerFailure):
                logger.error(str(result))
                failures.append(result)
                entry_failures += 1
            else:
                entry_records.extend(result)
        records.extend(entry_records)
        summaries.extend(_summarise(kind, entry, entry_records, entry_failures))
        logger.info(f"Finished scenario {entry.get('id', i)} of the {kind} experiment")
    return ExperimentResult(kind, records, summaries, failures)
