"""
Exponential-family observation models.

Every coordinate of a p-variate stream follows one member of the family below. An observation
y is mapped to its natural statistic x = s(y); a segment of c observations is summarised by
(c, S) with S the sum of natural statistics. All likelihoods are reported as twice the
log-likelihood with parameter-free constants dropped, so that

    segment_loglik_at(seg, eta) = 2<S, eta> - c A'(eta)
    segment_maxloglik(seg)      = sup over admissible eta of segment_loglik_at(seg, eta)

Example model config:

{
  "family": "gaussian_mean",
  "p": 3,
  "coords": [{"family": "poisson"}, {}, {"family": "binomial", "trials": 10}]
}
"""

# Standard Library
import json
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Sequence

# Third Party
import numpy as np
from scipy.special import logit, xlogy

# First Party
from mdfocus.core.config_constants import (
    DEFAULT_VAR_FLOOR,
    LOG_CLAMP,
    MODEL_COORDS_KEY,
    MODEL_DIM_KEY,
    MODEL_FAMILY_KEY,
    MODEL_TRIALS_KEY,
    MODEL_VAR_FLOOR_KEY,
    MODEL_YMIN_KEY,
)
from mdfocus.core.modes import ALLOWED_FAMILIES, Family
from mdfocus.core.utils import as_finite_vector
from mdfocus.exceptions import (
    ConfigError,
    InputError,
    ParameterDomainError,
    RejectedObservation,
    UndefinedSegment,
)

ALLOWED_PARAMS = [
    MODEL_FAMILY_KEY,
    MODEL_DIM_KEY,
    MODEL_COORDS_KEY,
    MODEL_TRIALS_KEY,
    MODEL_YMIN_KEY,
    MODEL_VAR_FLOOR_KEY,
]
ALLOWED_COORD_PARAMS = [MODEL_FAMILY_KEY, MODEL_TRIALS_KEY, MODEL_YMIN_KEY, MODEL_VAR_FLOOR_KEY]


class CoordinateFamily(ABC):
    """One exponential-family member governing a single coordinate.

    Vectorised methods take counts `c` broadcastable against `s[..., 0]` and sums `s` whose
    last axis has length `width`.
    """

    family = None
    width = 1

    def natural(self, y: float, coord: int) -> np.ndarray:
        self._check_domain(y, coord)
        return np.array([y], dtype=float)

    def _check_domain(self, y, coord):
        pass

    @abstractmethod
    def maxloglik(self, c, s):
        pass

    @abstractmethod
    def loglik_at(self, c, s, eta):
        pass

    @abstractmethod
    def mle(self, c, s) -> np.ndarray:
        """Natural parameter maximizing the segment likelihood, clamped inside the domain."""

    def check_eta(self, eta):
        pass

    def params(self) -> Dict[str, Any]:
        return {}

    def to_json_dict(self) -> Dict[str, Any]:
        d = {MODEL_FAMILY_KEY: self.family.value}
        d.update(self.params())
        return d

    def __eq__(self, other):
        if not isinstance(other, CoordinateFamily):
            return NotImplemented
        return self.to_json_dict() == other.to_json_dict()

    def __hash__(self):
        return hash(json.dumps(self.to_json_dict(), sort_keys=True))

    def __repr__(self):
        return f"<class {self.__class__.__name__}: {self.params()}>"


class GaussianMean(CoordinateFamily):
    family = Family.GAUSSIAN_MEAN

    def maxloglik(self, c, s):
        return s[..., 0] ** 2 / c

    def loglik_at(self, c, s, eta):
        eta = eta[..., 0]
        return 2 * s[..., 0] * eta - c * eta ** 2

    def mle(self, c, s):
        return np.array([s[0] / c])


class Poisson(CoordinateFamily):
    family = Family.POISSON

    def _check_domain(self, y, coord):
        if y < 0:
            raise RejectedObservation(coord, y, "Poisson counts must be nonnegative")

    def maxloglik(self, c, s):
        s = s[..., 0]
        return 2 * (xlogy(s, s / c) - s)

    def loglik_at(self, c, s, eta):
        eta = eta[..., 0]
        return 2 * s[..., 0] * eta - 2 * c * np.exp(eta)

    def mle(self, c, s):
        return np.array([np.log(max(s[0] / c, LOG_CLAMP))])


class Binomial(CoordinateFamily):
    family = Family.BINOMIAL

    def __init__(self, trials):
        if int(trials) != trials or trials < 1:
            raise ConfigError(f"Binomial trials={trials} must be a positive integer")
        self.trials = int(trials)

    def params(self):
        return {MODEL_TRIALS_KEY: self.trials}

    def _check_domain(self, y, coord):
        if y < 0 or y > self.trials:
            raise RejectedObservation(coord, y, f"Binomial counts must lie in [0, {self.trials}]")

    def maxloglik(self, c, s):
        s = s[..., 0]
        total = self.trials * c
        theta = np.clip(s / total, 0.0, 1.0)
        return 2 * (xlogy(s, theta) + xlogy(total - s, 1 - theta))

    def loglik_at(self, c, s, eta):
        eta = eta[..., 0]
        return 2 * s[..., 0] * eta - 2 * c * self.trials * np.logaddexp(0.0, eta)

    def mle(self, c, s):
        theta = np.clip(s[0] / (self.trials * c), LOG_CLAMP, 1 - LOG_CLAMP)
        return np.array([logit(theta)])


class Exponential(CoordinateFamily):
    """Rate parametrisation, eta = -rate < 0."""

    family = Family.EXPONENTIAL

    def _check_domain(self, y, coord):
        if y < 0:
            raise RejectedObservation(coord, y, "Exponential observations must be nonnegative")

    def maxloglik(self, c, s):
        mean = np.maximum(s[..., 0] / c, LOG_CLAMP)
        return -2 * c * np.log(mean) - 2 * c

    def check_eta(self, eta):
        if np.any(np.asarray(eta) >= 0):
            raise ParameterDomainError(self.family.value, eta)

    def loglik_at(self, c, s, eta):
        eta = eta[..., 0]
        return 2 * s[..., 0] * eta + 2 * c * np.log(-eta)

    def mle(self, c, s):
        return np.array([-1.0 / max(s[0] / c, LOG_CLAMP)])


class Pareto(CoordinateFamily):
    """Pareto type I with known scale y_min; x = log y and eta = -shape - 1 < -1."""

    family = Family.PARETO

    def __init__(self, y_min):
        if not y_min > 0:
            raise ConfigError(f"Pareto y_min={y_min} must be positive")
        self.y_min = float(y_min)
        self._log_ymin = float(np.log(self.y_min))

    def params(self):
        return {MODEL_YMIN_KEY: self.y_min}

    def _check_domain(self, y, coord):
        if y <= 0:
            raise RejectedObservation(coord, y, "Pareto observations must be positive")

    def natural(self, y, coord):
        self._check_domain(y, coord)
        return np.array([np.log(y)])

    def maxloglik(self, c, s):
        s = s[..., 0]
        inv_shape = np.maximum(s / c - self._log_ymin, LOG_CLAMP)
        return -2 * c * np.log(inv_shape) - 2 * c - 2 * s

    def check_eta(self, eta):
        if np.any(np.asarray(eta) >= -1):
            raise ParameterDomainError(self.family.value, eta)

    def loglik_at(self, c, s, eta):
        eta = eta[..., 0]
        return 2 * s[..., 0] * eta + 2 * c * np.log(-1 - eta) - 2 * c * (1 + eta) * self._log_ymin

    def mle(self, c, s):
        return np.array([-1.0 - 1.0 / max(s[0] / c - self._log_ymin, LOG_CLAMP)])


class GaussianMeanVariance(CoordinateFamily):
    """Change in mean and variance: x = (y, y^2), variance constrained to >= var_floor."""

    family = Family.GAUSSIAN_MEAN_VARIANCE
    width = 2

    def __init__(self, var_floor=DEFAULT_VAR_FLOOR):
        if not var_floor > 0:
            raise ConfigError(f"var_floor={var_floor} must be positive")
        self.var_floor = float(var_floor)

    def params(self):
        return {MODEL_VAR_FLOOR_KEY: self.var_floor}

    def natural(self, y, coord):
        return np.array([y, y * y], dtype=float)

    def _variance(self, c, s):
        m1 = s[..., 0] / c
        return np.maximum(s[..., 1] / c - m1 * m1, 0.0)

    def maxloglik(self, c, s):
        v = self._variance(c, s)
        floor = self.var_floor
        above = -c * np.log(np.maximum(v, floor)) - c
        below = -c * v / floor - c * np.log(floor)
        return np.where(v >= floor, above, below)

    def check_eta(self, eta):
        eta = np.asarray(eta, dtype=float).reshape(-1, 2)
        if np.any(eta[:, 1] >= 0):
            raise ParameterDomainError(self.family.value, eta.tolist())

    def loglik_at(self, c, s, eta):
        var = -0.5 / eta[..., 1]
        mean = eta[..., 0] * var
        ss = s[..., 1] - 2 * s[..., 0] * mean + c * mean * mean
        return -ss / var - c * np.log(var)

    def mle(self, c, s):
        mean = s[0] / c
        var = max(s[1] / c - mean * mean, self.var_floor)
        return np.array([mean / var, -0.5 / var])


_FAMILY_CLASSES = {
    Family.GAUSSIAN_MEAN: GaussianMean,
    Family.POISSON: Poisson,
    Family.BINOMIAL: Binomial,
    Family.EXPONENTIAL: Exponential,
    Family.PARETO: Pareto,
    Family.GAUSSIAN_MEAN_VARIANCE: GaussianMeanVariance,
}


def make_family(params: Dict[str, Any]) -> CoordinateFamily:
    name = params.get(MODEL_FAMILY_KEY)
    if name not in ALLOWED_FAMILIES:
        raise ConfigError(f"family={name} must be one of " + ",".join(ALLOWED_FAMILIES))
    unknown = [k for k in params if k not in ALLOWED_COORD_PARAMS]
    if unknown:
        raise ConfigError(
            "allowed params for a coordinate can only be one of " + ",".join(ALLOWED_COORD_PARAMS)
        )
    family = Family(name)
    if family == Family.BINOMIAL:
        if MODEL_TRIALS_KEY not in params:
            raise ConfigError("binomial coordinates need `trials`")
        return Binomial(params[MODEL_TRIALS_KEY])
    if family == Family.PARETO:
        if MODEL_YMIN_KEY not in params:
            raise ConfigError("pareto coordinates need `y_min`")
        return Pareto(params[MODEL_YMIN_KEY])
    if family == Family.GAUSSIAN_MEAN_VARIANCE:
        return GaussianMeanVariance(params.get(MODEL_VAR_FLOOR_KEY, DEFAULT_VAR_FLOOR))
    return _FAMILY_CLASSES[family]()


class SegmentSummary:
    """Count and natural-statistic sums of a segment."""

    __slots__ = ("count", "sums")

    def __init__(self, count: int, sums):
        if count < 0:
            raise InputError(f"segment count {count} must be nonnegative")
        sums = np.array(sums, dtype=float).reshape(-1)
        if count == 0 and np.any(sums != 0):
            raise InputError("an empty segment must have zero sums")
        sums.setflags(write=False)
        self.count = int(count)
        self.sums = sums

    def split(self, start: int, stop: int) -> "SegmentSummary":
        return SegmentSummary(self.count, self.sums[start:stop])

    def __eq__(self, other):
        if not isinstance(other, SegmentSummary):
            return NotImplemented
        return self.count == other.count and np.array_equal(self.sums, other.sums)

    def __repr__(self):
        return f"<class SegmentSummary: count={self.count}, sums={self.sums.tolist()}>"


class ModelSpec:
    """Per-coordinate families of a p-variate stream.

    Attributes
    ----------
    coords: list of CoordinateFamily, one per coordinate
    p: number of coordinates
    d_nat: dimension of the natural statistic (sum of coordinate widths)
    """

    def __init__(self, coords: Sequence[CoordinateFamily]):
        if len(coords) == 0:
            raise ConfigError("a model needs at least one coordinate")
        self.coords = list(coords)
        self.p = len(self.coords)
        offsets = np.cumsum([0] + [f.width for f in self.coords])
        self.d_nat = int(offsets[-1])
        self.columns = [tuple(range(offsets[i], offsets[i + 1])) for i in range(self.p)]
        self._groups = self._group_coordinates()

    @classmethod
    def homogeneous(cls, family: CoordinateFamily, p: int) -> "ModelSpec":
        return cls([family] * p)

    @classmethod
    def gaussian(cls, p: int) -> "ModelSpec":
        return cls.homogeneous(GaussianMean(), p)

    @classmethod
    def poisson(cls, p: int) -> "ModelSpec":
        return cls.homogeneous(Poisson(), p)

    def _group_coordinates(self):
        """Coordinates sharing a family are evaluated in one vectorised call."""
        groups = {}
        for i, family in enumerate(self.coords):
            groups.setdefault(family, []).append(i)
        out = []
        for family, idx in groups.items():
            cols = np.array([self.columns[i] for i in idx], dtype=int)
            out.append((family, np.array(idx, dtype=int), cols))
        return out

    @property
    def groups(self):
        """(family, coordinate indices, natural columns) of every distinct family."""
        return self._groups

    @property
    def is_mean_variance(self) -> bool:
        return any(f.family == Family.GAUSSIAN_MEAN_VARIANCE for f in self.coords)

    def coordinate_maxloglik(self, counts, sums) -> np.ndarray:
        """Per-coordinate maximized twice-log-likelihoods, shape (k, p), for k segments."""
        counts = np.asarray(counts, dtype=float)
        sums = np.asarray(sums, dtype=float)
        out = np.empty((counts.shape[0], self.p))
        for family, idx, cols in self._groups:
            out[:, idx] = family.maxloglik(counts[:, None], sums[:, cols])
        return out

    def coordinate_loglik_at(self, counts, sums, eta) -> np.ndarray:
        """Per-coordinate twice-log-likelihoods at natural parameter eta, shape (k, p)."""
        counts = np.asarray(counts, dtype=float)
        sums = np.asarray(sums, dtype=float)
        eta = np.asarray(eta, dtype=float)
        out = np.empty((counts.shape[0], self.p))
        for family, idx, cols in self._groups:
            out[:, idx] = family.loglik_at(counts[:, None], sums[:, cols], eta[cols])
        return out

    def check_eta(self, eta) -> np.ndarray:
        eta = as_finite_vector(eta, self.d_nat, what="natural parameter")
        for family, _, cols in self._groups:
            family.check_eta(eta[cols])
        return eta

    def mle(self, seg: SegmentSummary) -> np.ndarray:
        if seg.count == 0:
            raise UndefinedSegment(seg.count)
        eta = np.empty(self.d_nat)
        for family, cols in zip(self.coords, self.columns):
            eta[list(cols)] = family.mle(seg.count, seg.sums[list(cols)])
        return eta

    @classmethod
    def from_dict(cls, params: Dict[str, Any]) -> "ModelSpec":
        if not isinstance(params, dict):
            raise ConfigError(f"model={params} must be a dict")
        if any([x not in ALLOWED_PARAMS for x in params]):
            raise ConfigError(
                "allowed params for the model can only be one of " + ",".join(ALLOWED_PARAMS)
            )
        if MODEL_DIM_KEY not in params and MODEL_COORDS_KEY not in params:
            raise ConfigError("model needs `p` or an explicit `coords` list")
        coord_params = params.get(MODEL_COORDS_KEY) or []
        p = params.get(MODEL_DIM_KEY, len(coord_params))
        if int(p) != p or p < 1:
            raise ConfigError(f"p={p} must be a positive integer")
        if coord_params and len(coord_params) != p:
            raise ConfigError(f"model has p={p} but {len(coord_params)} coordinate entries")
        base = {k: v for k, v in params.items() if k not in (MODEL_DIM_KEY, MODEL_COORDS_KEY)}
        coords = []
        for i in range(int(p)):
            override = coord_params[i] if coord_params else {}
            merged = dict(base)
            if MODEL_FAMILY_KEY in override:
                # a family override drops the base family's parameters
                merged = {MODEL_FAMILY_KEY: override[MODEL_FAMILY_KEY]}
            merged.update(override)
            coords.append(make_family(_keep_relevant(merged)))
        return cls(coords)

    @classmethod
    def from_json(cls, json_str: str) -> "ModelSpec":
        return cls.from_dict(json.loads(json_str))

    def to_json_dict(self) -> Dict[str, Any]:
        first = self.coords[0]
        if all(f == first for f in self.coords):
            d = first.to_json_dict()
            d[MODEL_DIM_KEY] = self.p
            return d
        return {MODEL_DIM_KEY: self.p, MODEL_COORDS_KEY: [f.to_json_dict() for f in self.coords]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    def __eq__(self, other):
        if not isinstance(other, ModelSpec):
            return NotImplemented
        return self.coords == other.coords

    def __repr__(self):
        return f"<class ModelSpec: p={self.p}, d_nat={self.d_nat}, coords={self.coords}>"


def _keep_relevant(params: Dict[str, Any]) -> Dict[str, Any]:
    """Drops parameters that belong to other families (e.g. a global var_floor)."""
    family = params.get(MODEL_FAMILY_KEY)
    relevant = {
        Family.BINOMIAL.value: [MODEL_TRIALS_KEY],
        Family.PARETO.value: [MODEL_YMIN_KEY],
        Family.GAUSSIAN_MEAN_VARIANCE.value: [MODEL_VAR_FLOOR_KEY],
    }.get(family, [])
    return {k: v for k, v in params.items() if k == MODEL_FAMILY_KEY or k in relevant}


def to_natural(model: ModelSpec, y) -> np.ndarray:
    y = as_finite_vector(y, model.p)
    return np.concatenate([f.natural(float(v), i) for i, (f, v) in enumerate(zip(model.coords, y))])


def segment_maxloglik(model: ModelSpec, seg: SegmentSummary) -> float:
    if seg.count == 0:
        raise UndefinedSegment(seg.count)
    _check_sums(model, seg)
    return float(model.coordinate_maxloglik([seg.count], seg.sums[None, :]).sum())


def segment_loglik_at(model: ModelSpec, seg: SegmentSummary, eta) -> float:
    _check_sums(model, seg)
    eta = model.check_eta(eta)
    return float(model.coordinate_loglik_at([seg.count], seg.sums[None, :], eta).sum())


def _check_sums(model, seg):
    if seg.sums.shape[0] != model.d_nat:
        raise InputError(
            f"segment sums have dimension {seg.sums.shape[0]}, model expects {model.d_nat}"
        )


def estimate_prechange(model: ModelSpec, training: List[np.ndarray]) -> np.ndarray:
    """Plug-in natural parameter from training observations given on the natural scale."""
    training = np.asarray(training, dtype=float).reshape(-1, model.d_nat)
    seg = SegmentSummary(training.shape[0], training.sum(axis=0))
    return model.mle(seg)
