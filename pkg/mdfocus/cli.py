"""
Command-line entry point.

    mdfocus detect      stream a CSV of raw observations through an engine and stop on a threshold
    mdfocus calibrate   write a threshold plan (analytic-arl, analytic-fa or monte-carlo)
    mdfocus oracle      expected hull face and vertex counts of a random walk
    mdfocus experiment  simulation studies (hullcount, runtime_slope, arl, add, falsealarm)
    mdfocus edetect     hull candidates of an e-detector over a CSV of scores or a null simulation

Exit codes: 0 ok, 1 configuration error, 2 data error, 3 internal invariant violation or
failed experiment replicates.
"""

# Standard Library
import argparse
import os
import sys
from typing import List, Optional

# Third Party
import numpy as np

# First Party
from mdfocus._version import __version__
from mdfocus.calibration.expectation import expected_counts
from mdfocus.calibration.thresholds import analytic_arl_plan, false_alarm_plan
from mdfocus.core.access_layer.file import (
    TRACE_CSV,
    TRACE_JSONL,
    AtomicFile,
    TraceWriter,
    read_rows,
    write_csv,
)
from mdfocus.core.config_constants import (
    CONFIG_FILE_PATH_ENV_STR,
    DEFAULT_TRAINING_SIZE,
    MULTIPROCESSING_POOL_SIZE_ENV_STR,
    PRECHANGE_ESTIMATE_KEY,
    STDIN_PATH,
    THRESHOLD_PLAN_PATH_ENV_STR,
)
from mdfocus.core.json_config import get_json_config_as_dict
from mdfocus.core.logger import get_logger, set_console_stream
from mdfocus.core.modes import ALLOWED_ENGINES, ALLOWED_THRESHOLD_MODES, ThresholdMode
from mdfocus.core.run_config import RunConfig
from mdfocus.detectors.decision import run_detection
from mdfocus.detectors.edetector import (
    ALLOWED_PRESETS,
    EDetectorSpec,
    cusum_argmax,
    edetector_trace,
)
from mdfocus.exceptions import ConfigError, InputError, InvariantViolation, WorkerFailure
from mdfocus.simlab.experiments import ALLOWED_KINDS, run_experiment
from mdfocus.simlab.montecarlo import monte_carlo_plan
from mdfocus.simlab.plusminus import ALLOWED_SIMULATORS, RESAMPLE, simulate
from mdfocus.simlab.scenarios import StreamScenario, generate, make_rng

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

logger = get_logger()


def _env_int(name) -> Optional[int]:
    value = os.getenv(name)
    return int(value) if value else None


def _add_config_flags(parser):
    parser.add_argument(
        "--config",
        default=None,
        help=f"Run config JSON; defaults to ${CONFIG_FILE_PATH_ENV_STR}",
    )
    parser.add_argument("--engine", choices=ALLOWED_ENGINES, default=None)
    parser.add_argument("--alpha", type=float, default=None, help="Candidate budget slope (>= 1)")
    parser.add_argument("--beta", type=float, default=None, help="Candidate budget offset (>= 0)")
    parser.add_argument("--qmin", type=int, default=None, help="Smallest dyadic block exponent")
    parser.add_argument("--ptilde", type=int, default=None, help="Projection block size")
    parser.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdfocus", description="Online multivariate changepoint detection"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")

    detect = sub.add_parser("detect", help="Run detection over a CSV stream")
    _add_config_flags(detect)
    detect.add_argument("input", nargs="?", default=None, help="CSV file, '-' for stdin")
    detect.add_argument("--output", default=None, help="Record sink, '-' for stdout")
    detect.add_argument(
        "--threshold-plan",
        dest="threshold_plan",
        default=os.getenv(THRESHOLD_PLAN_PATH_ENV_STR),
        help=f"Threshold plan JSON; defaults to ${THRESHOLD_PLAN_PATH_ENV_STR}",
    )
    detect.add_argument(
        "--trace", action="store_true", help="Write one record per step before the stop record"
    )
    detect.add_argument("--format", choices=[TRACE_JSONL, TRACE_CSV], default=None)
    detect.add_argument(
        "--estimate",
        type=int,
        nargs="?",
        const=DEFAULT_TRAINING_SIZE,
        default=None,
        help="Estimate the pre-change parameter from the first K rows",
    )

    calibrate = sub.add_parser("calibrate", help="Write a threshold plan")
    _add_config_flags(calibrate)
    calibrate.add_argument("mode", choices=ALLOWED_THRESHOLD_MODES)
    calibrate.add_argument("--gamma", type=float, default=None, help="Target average run length")
    calibrate.add_argument(
        "--level", type=float, default=None, help="False-alarm probability of the plan"
    )
    calibrate.add_argument(
        "--no-split", dest="split", action="store_false", help="Do not share the level"
    )
    calibrate.add_argument("--horizon", type=int, default=1000, help="Null stream length")
    calibrate.add_argument("--replicates", type=int, default=200)
    calibrate.add_argument("--output", default=STDIN_PATH)

    oracle = sub.add_parser("oracle", help="Expected hull sizes")
    oracle.add_argument("--p", type=int, nargs="+", required=True)
    oracle.add_argument("--n", type=int, nargs="+", required=True)
    oracle.add_argument("--include-zero-order", dest="include_zero_order", action="store_true")
    oracle.add_argument("--output", default=STDIN_PATH)

    experiment = sub.add_parser("experiment", help="Simulation studies")
    experiment.add_argument("kind", choices=ALLOWED_KINDS)
    experiment.add_argument("--grid", required=True, help='JSON object {"scenarios": [...]}')
    experiment.add_argument("--replicates", type=int, default=20)
    experiment.add_argument(
        "--workers", type=int, default=_env_int(MULTIPROCESSING_POOL_SIZE_ENV_STR) or 1
    )
    experiment.add_argument("--seed", type=int, default=None)
    experiment.add_argument("--output", default=STDIN_PATH, help="Per-replicate records CSV")
    experiment.add_argument("--summary", default=STDIN_PATH, help="Summary CSV")

    edetect = sub.add_parser("edetect", help="E-detector candidates over a score stream")
    edetect.add_argument(
        "scores", nargs="?", default=None, help="One-column CSV of raw scores, '-' for stdin"
    )
    edetect.add_argument(
        "--simulate", choices=ALLOWED_SIMULATORS, default=None, help="Score a null simulation"
    )
    edetect.add_argument("--length", type=int, default=640, help="Simulated stream length")
    edetect.add_argument("--seed", type=int, default=None)
    edetect.add_argument("--preset", choices=ALLOWED_PRESETS, required=True)
    edetect.add_argument("--lam", type=float, default=None, help="Also report the CUSUM value")
    edetect.add_argument("--output", default=STDIN_PATH)
    return parser


def load_run_config(args, **overrides) -> RunConfig:
    config = RunConfig.from_dict(get_json_config_as_dict(args.config))
    return config.override(
        engine=args.engine,
        alpha=args.alpha,
        beta=args.beta,
        q_min=args.qmin,
        ptilde=args.ptilde,
        seed=args.seed,
        **overrides,
    )


def cmd_detect(args) -> int:
    prechange = None
    if args.estimate is not None:
        prechange = {PRECHANGE_ESTIMATE_KEY: args.estimate}
    config = load_run_config(
        args,
        input=args.input,
        output=args.output,
        format=args.format,
        threshold_plan=args.threshold_plan,
        prechange=prechange,
    )
    plan = config.load_threshold_plan()
    plan.covers(config.stat_config.names)
    logger.info(f"Run config: {config.to_json()}")
    rows = read_rows(config.input, width=config.model.p)
    with config.build_engine() as engine, TraceWriter(config.output, config.format) as sink:
        def on_report(report):
            sink.write(report.to_json_dict())

        if args.trace and config.format == TRACE_JSONL:
            sink.write({"config": config.to_json_dict()})
        decision = run_detection(engine, rows, plan, on_report=on_report if args.trace else None)
        record = decision.to_json_dict()
        if config.format == TRACE_JSONL:
            sink.write(record)
    if config.format == TRACE_CSV:
        TraceWriter(STDIN_PATH).write(record)
    return EXIT_OK


def _null_generator(config: RunConfig):
    pre = config.stat_config.prechange.known

    def null_stream(rng, horizon):
        return generate(StreamScenario(config.model, horizon, pre=pre), rng)

    return null_stream


def cmd_calibrate(args) -> int:
    config = load_run_config(args)
    statistics = config.stat_config.statistics
    p = config.model.p
    mode = ThresholdMode(args.mode)
    if mode == ThresholdMode.ANALYTIC_ARL:
        if args.gamma is None:
            raise ConfigError("analytic-arl calibration needs --gamma")
        plan = analytic_arl_plan(statistics, p, args.gamma)
    elif mode == ThresholdMode.ANALYTIC_FA:
        if args.level is None:
            raise ConfigError("analytic-fa calibration needs --level")
        plan = false_alarm_plan(statistics, p, args.level, split=args.split)
    else:
        plan = monte_carlo_plan(
            config.build_engine,
            _null_generator(config),
            args.horizon,
            args.replicates,
            gamma=args.gamma,
            level=args.level,
            seed=config.seed,
        )
    document = plan.to_json() + "\n"
    if args.output == STDIN_PATH:
        sys.stdout.write(document)
    else:
        with AtomicFile(args.output) as f:
            f.write(document)
        logger.info(f"Wrote {args.mode} threshold plan to {args.output}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    rows = []
    for p in args.p:
        for n in args.n:
            faces, vertices = expected_counts(n, p, include_zero_order=args.include_zero_order)
            rows.append([n, p, faces, vertices])
    write_csv(args.output, ["n", "p", "E_faces", "E_vertices"], rows)
    return EXIT_OK


def cmd_experiment(args) -> int:
    grid = get_json_config_as_dict(args.grid).get("scenarios")
    if not isinstance(grid, list) or not grid:
        raise ConfigError(f"grid {args.grid} must hold a nonempty scenarios list")
    result = run_experiment(args.kind, grid, args.replicates, workers=args.workers, seed=args.seed)
    result.write(args.output, args.summary)
    if not result.complete:
        logger.error(f"{len(result.failures)} replicates of the {args.kind} experiment failed")
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_edetect(args) -> int:
    spec = EDetectorSpec.preset(args.preset)
    scores = None
    if args.scores is not None:
        scores = np.array([row[0] for row in read_rows(args.scores, width=1)])
    if args.simulate is None:
        if scores is None:
            raise ConfigError("edetect needs a scores file or --simulate")
        stream = scores
    elif args.simulate == RESAMPLE:
        if scores is None:
            raise ConfigError("--simulate resample draws from the scores file, which is missing")
        stream = simulate(RESAMPLE, args.length, make_rng(args.seed), history=scores)
    else:
        stream = simulate(args.simulate, args.length, make_rng(args.seed))
    header = ["n", "vertices", "candidates"]
    if args.lam is not None:
        header += ["value", "tau"]
        psi = spec.psi(args.lam)

    def rows():
        for n, labels in edetector_trace(spec, stream):
            row = [n, len(labels), " ".join(str(t) for t in labels)]
            if args.lam is not None:
                row += list(cusum_argmax(spec, stream[:n], args.lam, psi, candidates=labels))
            yield row

    write_csv(args.output, header, rows())
    return EXIT_OK


COMMANDS = {
    "detect": cmd_detect,
    "calibrate": cmd_calibrate,
    "oracle": cmd_oracle,
    "experiment": cmd_experiment,
    "edetect": cmd_edetect,
}


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # stdout only carries records and tables
    set_console_stream(sys.stderr)
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except (InputError, OSError) as e:
        logger.error(f"Data error: {e}")
        return EXIT_DATA
    except (InvariantViolation, WorkerFailure) as e:
        logger.error(f"Internal error: {e}")
        return EXIT_INTERNAL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
