# Third Party
import numpy as np
import pytest

# First Party
from mdfocus.core.model import ModelSpec
from mdfocus.detectors.engine import MdFocusEngine
from mdfocus.detectors.statistics import Prechange, StatConfig, Statistic
from mdfocus.exceptions import ConfigError
from mdfocus.simlab.montecarlo import calibrate_null_threshold, monte_carlo_plan, running_maxima


def _factory(p=2):
    config = StatConfig([Statistic.dense(), Statistic.ranked(1)], Prechange(known=np.zeros(p)))
    return lambda: MdFocusEngine(ModelSpec.gaussian(p), config)


def _null(rng, horizon):
    return rng.standard_normal((horizon, 2))


def test_running_maxima():
    engine = _factory(1)()
    best = running_maxima(engine, [[0.0], [3.0], [0.0]])
    assert list(best) == ["dense", "ranked:1"]
    assert best["dense"] == pytest.approx(9.0)


def test_thresholds_are_seeded():
    first = calibrate_null_threshold(_factory(), _null, 100, 0.1, 20, seed=5)
    second = calibrate_null_threshold(_factory(), _null, 100, 0.1, 20, seed=5)
    assert first == second
    assert 0 < first["ranked:1"] <= first["dense"]


def test_plan_provenance():
    plan = monte_carlo_plan(_factory(), _null, 100, 20, gamma=1000, seed=5)
    assert plan.provenance["kind"] == "monte_carlo"
    assert plan.provenance["level"] == pytest.approx(0.1)
    assert plan.value("dense", 50) == plan.value("dense", 5000)
    with pytest.raises(ConfigError):
        monte_carlo_plan(_factory(), _null, 100, 20)


def test_calibration_errors():
    with pytest.raises(ConfigError):
        calibrate_null_threshold(_factory(), _null, 100, 1.5, 20)
    with pytest.raises(ConfigError):
        calibrate_null_threshold(_factory(), _null, 100, 0.1, 1)
