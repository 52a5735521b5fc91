# Third Party
import numpy as np
import pytest

# First Party
from mdfocus.core.model import ModelSpec
from mdfocus.detectors.statistics import Prechange, StatConfig, Statistic


def stat_config(p, known, exact_only=True):
    stats = [Statistic.dense(), Statistic.ranked(1), Statistic.sum_of_max()]
    if p >= 2:
        stats.append(Statistic.ranked(2))
    if p == 1 or not exact_only:
        stats.append(Statistic.thresholded(1.0))
    prechange = Prechange(known=np.zeros(p)) if known else Prechange.unknown()
    return StatConfig(stats, prechange)


def make_stream(rng, family, p, n, change_at=None):
    """Gaussian N(0, 1) or Poisson(1) rows; after change_at the first coordinate shifts."""
    if family == "gaussian":
        stream = rng.normal(size=(n, p))
        if change_at is not None:
            stream[change_at:, 0] += 1.5
        return ModelSpec.gaussian(p), stream
    rates = np.ones((n, p))
    if change_at is not None:
        rates[change_at:, 0] = 3.0
    return ModelSpec.poisson(p), rng.poisson(rates).astype(float)


def run_engine(engine, stream):
    return [engine.step(row) for row in stream]


def assert_same_values(reports, reference):
    assert len(reports) == len(reference)
    for got, want in zip(reports, reference):
        assert got.n == want.n
        for name, value in want.values.items():
            assert got[name].value == pytest.approx(value.value, rel=1e-9, abs=1e-9), (
                f"{name} differs at n={got.n}"
            )


def exactness_grid():
    for family in ("gaussian", "poisson"):
        for p in (1, 2, 3):
            for known in (True, False):
                for change in (False, True):
                    yield family, p, known, change
