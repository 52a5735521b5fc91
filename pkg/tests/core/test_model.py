# Third Party
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# First Party
from mdfocus.core.model import (
    Binomial,
    Exponential,
    GaussianMean,
    GaussianMeanVariance,
    ModelSpec,
    Pareto,
    Poisson,
    SegmentSummary,
    estimate_prechange,
    segment_loglik_at,
    segment_maxloglik,
    to_natural,
)
from mdfocus.core.modes import Family
from mdfocus.exceptions import (
    ConfigError,
    InputError,
    ParameterDomainError,
    RejectedObservation,
    UndefinedSegment,
)


def test_natural_gaussian():
    x = to_natural(ModelSpec.gaussian(1), [2.5])
    assert x.tolist() == [2.5]


def test_natural_mean_variance():
    model = ModelSpec([GaussianMeanVariance()])
    assert model.d_nat == 2
    assert to_natural(model, [3.0]).tolist() == [3.0, 9.0]


def test_natural_pareto():
    model = ModelSpec([Pareto(1.0)])
    assert to_natural(model, [1.0]).tolist() == [0.0]


def test_rejected_observation_names_coordinate():
    model = ModelSpec([GaussianMean(), Pareto(1.0)])
    with pytest.raises(RejectedObservation) as e:
        to_natural(model, [1.0, -2.0])
    assert e.value.coord == 1
    with pytest.raises(RejectedObservation):
        to_natural(ModelSpec.poisson(1), [-1])
    with pytest.raises(RejectedObservation):
        to_natural(ModelSpec([Binomial(3)]), [4])


def test_natural_dimension_and_finiteness():
    with pytest.raises(InputError):
        to_natural(ModelSpec.gaussian(2), [1.0])
    with pytest.raises(InputError):
        to_natural(ModelSpec.gaussian(1), [np.nan])


def test_maxloglik_examples():
    assert segment_maxloglik(ModelSpec.gaussian(1), SegmentSummary(4, [0.0])) == 0
    assert segment_maxloglik(ModelSpec.gaussian(2), SegmentSummary(2, [2.0, -2.0])) == 4
    model = ModelSpec([GaussianMeanVariance(var_floor=1.0)])
    assert segment_maxloglik(model, SegmentSummary(3, [0.0, 3.0])) == pytest.approx(-3)


def test_maxloglik_empty_segment():
    with pytest.raises(UndefinedSegment):
        segment_maxloglik(ModelSpec.gaussian(1), SegmentSummary(0, [0.0]))


def test_maxloglik_zero_counts_follow_xlogy():
    # 0 log 0 = 0
    assert segment_maxloglik(ModelSpec.poisson(1), SegmentSummary(5, [0.0])) == 0
    model = ModelSpec([Binomial(2)])
    assert segment_maxloglik(model, SegmentSummary(3, [0.0])) == 0
    assert segment_maxloglik(model, SegmentSummary(3, [6.0])) == 0


def test_maxloglik_boundaries_are_clamped():
    assert np.isfinite(segment_maxloglik(ModelSpec([Exponential()]), SegmentSummary(2, [0.0])))
    assert np.isfinite(segment_maxloglik(ModelSpec([Pareto(1.0)]), SegmentSummary(2, [0.0])))


def test_loglik_at_examples():
    gaussian = ModelSpec.gaussian(1)
    assert segment_loglik_at(gaussian, SegmentSummary(2, [3.0]), [0.0]) == 0
    assert segment_loglik_at(gaussian, SegmentSummary(2, [3.0]), [1.0]) == 4
    poisson = ModelSpec.poisson(1)
    assert segment_loglik_at(poisson, SegmentSummary(2, [4.0]), [0.0]) == pytest.approx(-4)


def test_loglik_at_domain():
    with pytest.raises(ParameterDomainError):
        segment_loglik_at(ModelSpec([Exponential()]), SegmentSummary(1, [1.0]), [0.5])
    with pytest.raises(ParameterDomainError):
        segment_loglik_at(ModelSpec([Pareto(1.0)]), SegmentSummary(1, [1.0]), [-0.5])
    with pytest.raises(InputError):
        segment_loglik_at(ModelSpec.gaussian(2), SegmentSummary(1, [1.0]), [0.0, 0.0])


def _models():
    return [
        (ModelSpec.gaussian(2), lambda rng, c: rng.normal(size=(c, 2))),
        (ModelSpec.poisson(2), lambda rng, c: rng.poisson(3.0, size=(c, 2))),
        (
            ModelSpec([Binomial(5), Exponential()]),
            lambda rng, c: np.column_stack(
                [rng.binomial(5, 0.3, size=c), rng.exponential(2.0, size=c)]
            ),
        ),
        (
            ModelSpec([GaussianMean(), GaussianMeanVariance(var_floor=0.01)]),
            lambda rng, c: rng.normal(size=(c, 2)),
        ),
    ]


def _segment(model, sampler, rng, c):
    xs = np.array([to_natural(model, y) for y in sampler(rng, c)])
    return SegmentSummary(c, xs.sum(axis=0)), xs


def test_maxloglik_dominates_fixed_parameter(rng):
    for model, sampler in _models():
        seg, _ = _segment(model, sampler, rng, 7)
        best = segment_maxloglik(model, seg)
        eta_hat = model.mle(seg)
        assert segment_loglik_at(model, seg, eta_hat) == pytest.approx(best, abs=1e-8)
        for _ in range(50):
            eta = eta_hat + rng.normal(scale=0.3, size=model.d_nat)
            try:
                value = segment_loglik_at(model, seg, eta)
            except ParameterDomainError:
                continue
            assert value <= best + 1e-9


def test_loglik_additive_over_segments(rng):
    for model, sampler in _models():
        seg, xs = _segment(model, sampler, rng, 6)
        eta = model.mle(seg)
        left = SegmentSummary(2, xs[:2].sum(axis=0))
        right = SegmentSummary(4, xs[2:].sum(axis=0))
        whole = segment_loglik_at(model, seg, eta)
        parts = segment_loglik_at(model, left, eta) + segment_loglik_at(model, right, eta)
        assert whole == pytest.approx(parts, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(
    st.integers(min_value=1, max_value=50),
    st.lists(st.floats(min_value=-100, max_value=100), min_size=3, max_size=3),
)
def test_gaussian_maxloglik_is_sum_of_squares_over_count(c, sums):
    model = ModelSpec.gaussian(3)
    value = segment_maxloglik(model, SegmentSummary(c, sums))
    assert value == pytest.approx(sum(s * s for s in sums) / c, rel=1e-9, abs=1e-9)


def test_estimate_prechange():
    model = ModelSpec.gaussian(2)
    eta = estimate_prechange(model, [[1.0, 0.0], [3.0, 2.0]])
    assert eta.tolist() == [2.0, 1.0]
    eta = estimate_prechange(ModelSpec.poisson(1), [[0.0], [0.0]])
    assert np.isfinite(eta[0])


def test_model_from_dict_mixed():
    model = ModelSpec.from_dict(
        {
            "family": "gaussian_mean",
            "p": 3,
            "coords": [{"family": "poisson"}, {}, {"family": "binomial", "trials": 10}],
        }
    )
    assert [f.family for f in model.coords] == [
        Family.POISSON,
        Family.GAUSSIAN_MEAN,
        Family.BINOMIAL,
    ]
    assert model.coords[2].trials == 10
    assert ModelSpec.from_json(model.to_json()) == model


def test_model_from_dict_homogeneous():
    model = ModelSpec.from_dict({"family": "gaussian_mean_variance", "p": 2, "var_floor": 0.5})
    assert model.d_nat == 4
    assert model.columns == [(0, 1), (2, 3)]
    assert model.to_json_dict() == {"family": "gaussian_mean_variance", "var_floor": 0.5, "p": 2}
    assert ModelSpec.from_dict({"family": "poisson", "p": 4}) == ModelSpec.poisson(4)


def test_model_groups_share_families():
    model = ModelSpec([Poisson(), GaussianMean(), Poisson()])
    groups = {family.family: idx.tolist() for family, idx, _ in model.groups}
    assert groups == {Family.POISSON: [0, 2], Family.GAUSSIAN_MEAN: [1]}


def test_model_config_errors():
    with pytest.raises(ConfigError):
        ModelSpec.from_dict({"family": "cauchy", "p": 1})
    with pytest.raises(ConfigError):
        ModelSpec.from_dict({"family": "binomial", "p": 1})
    with pytest.raises(ConfigError):
        ModelSpec.from_dict({"family": "pareto", "p": 1, "y_min": 0})
    with pytest.raises(ConfigError):
        ModelSpec.from_dict({"family": "gaussian_mean"})
    with pytest.raises(ConfigError):
        ModelSpec.from_dict({"family": "gaussian_mean", "p": 2, "coords": [{}]})
    with pytest.raises(ConfigError):
        ModelSpec.from_dict({"family": "gaussian_mean", "p": 1, "rate": 2})
    with pytest.raises(ConfigError):
        ModelSpec([])
