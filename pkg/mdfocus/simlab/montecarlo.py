# Standard Library
from collections import OrderedDict
from typing import Callable, Dict, Iterable, Optional

# Third Party
import numpy as np

# First Party
from mdfocus.calibration.thresholds import ThresholdPlan
from mdfocus.core.logger import get_logger
from mdfocus.core.modes import Provenance
from mdfocus.detectors.engine import Engine
from mdfocus.exceptions import ConfigError
from mdfocus.simlab.scenarios import make_rng

logger = get_logger()


def running_maxima(engine: Engine, rows: Iterable) -> "OrderedDict[str, float]":
    """Largest value of every statistic over a stream of natural vectors."""
    best = OrderedDict((name, 0.0) for name in engine.config.names)
    for row in rows:
        report = engine.step(row)
        if report is None:
            continue
        for name, stat in report.values.items():
            if stat.value > best[name]:
                best[name] = stat.value
    return best


def calibrate_null_threshold(
    engine_factory: Callable[[], Engine],
    null_generator: Callable[[np.random.Generator, int], np.ndarray],
    horizon: int,
    level: float,
    replicates: int,
    seed: Optional[int] = None,
) -> Dict[str, float]:
    """Thresholds crossed by a fraction `level` of null streams of length `horizon`.

    Each threshold is the (1 - level) quantile, with linear interpolation, of the running
    maximum of its statistic over independent null streams; replicate r uses make_rng(seed, r).
    """
    if not 0 < level < 1:
        raise ConfigError(f"level={level} must lie in (0, 1)")
    if replicates < 2:
        raise ConfigError("Monte-Carlo calibration needs at least two replicates")
    maxima = None
    for r in range(replicates):
        stream = null_generator(make_rng(seed, r), horizon)
        with engine_factory() as engine:
            peaks = running_maxima(engine, stream)
        if maxima is None:
            maxima = OrderedDict((name, []) for name in peaks)
        for name, value in peaks.items():
            maxima[name].append(value)
    thresholds = OrderedDict(
        (name, float(np.quantile(values, 1 - level))) for name, values in maxima.items()
    )
    logger.info(
        f"Monte-Carlo thresholds at level {level} over {replicates} null streams of length "
        f"{horizon}: {dict(thresholds)}"
    )
    return thresholds


def monte_carlo_plan(
    engine_factory: Callable[[], Engine],
    null_generator: Callable[[np.random.Generator, int], np.ndarray],
    horizon: int,
    replicates: int,
    gamma: Optional[float] = None,
    level: Optional[float] = None,
    seed: Optional[int] = None,
) -> ThresholdPlan:
    """Fixed thresholds from null simulations; level defaults to horizon / gamma."""
    if level is None:
        if gamma is None:
            raise ConfigError("Monte-Carlo calibration needs gamma or level")
        level = horizon / gamma
    thresholds = calibrate_null_threshold(
        engine_factory, null_generator, horizon, level, replicates, seed=seed
    )
    provenance = {
        "kind": Provenance.MONTE_CARLO.value,
        "level": level,
        "horizon": horizon,
        "replicates": replicates,
        "seed": seed,
    }
    if gamma is not None:
        provenance["gamma"] = gamma
    return ThresholdPlan.fixed(thresholds, provenance)
