# Standard Library
import math

# Third Party
import pytest

# First Party
from mdfocus.calibration.bounds import (
    DelayBound,
    add_bound,
    dd_bound,
    effective_sparsity,
    ranked_norm2,
    thresholded_dd_bound,
)
from mdfocus.exceptions import ConfigError, InfiniteDelay


def test_add_bound_examples():
    assert add_bound(0, 1) == pytest.approx(2.5958, abs=1e-4)
    assert add_bound(10, 4) == pytest.approx((10 + 2 * math.sqrt(8 / math.pi)) / 4 + 1)


def test_add_bound_affine_in_c():
    base = add_bound(0, 2.0)
    for c in (1.0, 5.0, 20.0):
        assert add_bound(c, 2.0) - base == pytest.approx(c / 2.0)
        assert add_bound(2 * c, 2.0) - add_bound(c, 2.0) == pytest.approx(c / 2.0)


def test_add_bound_thresholded():
    assert add_bound(5, 1, thresholded_a=2, p=3) == add_bound(5 + 12, 1)
    with pytest.raises(ConfigError):
        add_bound(5, 1, thresholded_a=2)


def test_add_bound_errors():
    with pytest.raises(InfiniteDelay):
        add_bound(5, 0)
    with pytest.raises(ConfigError):
        add_bound(-1, 1)


def test_dd_basic_example():
    assert dd_bound(0, 1, 1, 2 / math.e) == pytest.approx(8)


def test_dd_basic_decreases_with_change():
    values = [dd_bound(20, 3, d2, 0.05) for d2 in (0.5, 1, 2, 4, 8)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_dd_centered():
    c, p, d2, alpha = 30.0, 5, 2.0, 0.1
    expected = (2 * (c - p) + 2 * math.sqrt(p * math.log(3 / alpha)) - 8 * math.log(alpha / 3)) / d2
    assert dd_bound(c, p, d2, alpha, "centered") == pytest.approx(expected)
    wide = dd_bound(c, p, d2, alpha, "centered_wide")
    assert wide - dd_bound(c, p, d2, alpha, "centered") == pytest.approx(
        2 * math.sqrt(p * math.log(3 / alpha)) / d2
    )


def test_dd_errors():
    with pytest.raises(ConfigError):
        dd_bound(5, 5, 1, 0.1, "centered")
    with pytest.raises(ConfigError):
        dd_bound(5, 5, 1, 0.1, "tight")
    with pytest.raises(InfiniteDelay):
        dd_bound(5, 5, 0, 0.1)
    with pytest.raises(ConfigError):
        dd_bound(5, 5, 1, 0)


def test_delay_bound_record():
    bound = DelayBound.evaluate("dense", 10.0, 3, 1.0, 0.1)
    assert bound.value == dd_bound(10.0, 3, 1.0, 0.1)
    assert bound.to_json_dict()["statistic"] == "dense"


def test_ranked_norm2():
    assert ranked_norm2([3, -4, 1], 2) == 25
    assert ranked_norm2([3, -4, 1], 3) == 26
    with pytest.raises(ConfigError):
        ranked_norm2([3, -4, 1], 4)


def test_effective_sparsity():
    assert effective_sparsity([1.0, 0.0, 0.0, 0.0]) == 1
    assert effective_sparsity([1.0, 1.0, 1.0, 1.0]) == 2
    assert effective_sparsity([2.0]) == 1
    with pytest.raises(InfiniteDelay):
        effective_sparsity([0.0, 0.0])


def test_thresholded_dd_bound():
    delta = [1.0, 1.0, 0.0, 0.0]
    value = thresholded_dd_bound(40.0, 2.0, delta, 0.1)
    assert value > 0
    assert thresholded_dd_bound(40.0, 2.0, [2 * d for d in delta], 0.1) < value
    with pytest.raises(ConfigError):
        thresholded_dd_bound(40.0, 2.0, [1.0], 0.1)
    with pytest.raises(ConfigError):
        thresholded_dd_bound(40.0, 2.0, delta, 1.5)
