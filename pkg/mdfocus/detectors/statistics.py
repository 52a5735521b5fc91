"""
Generalized likelihood ratio statistics over a set of candidate changepoints.

Per-coordinate contributions R[k, i] are twice-log likelihood ratios of candidate k on
coordinate i (for Gaussian means these are the squared evidences e_i^2). Statistics combine
them:

    dense            max_k sum_i R[k, i]
    ranked:s         max_k sum of the s largest R[k, i]
    thresholded:a    max_k sum_i R[k, i] 1{R[k, i] >= a^2}
    sum_of_max       sum_i max_k R[k, i]
"""

# Standard Library
import json
from collections import OrderedDict
from typing import Any, Dict, List, Optional, Sequence

# Third Party
import numpy as np

# First Party
from mdfocus.core.config_constants import (
    CONFIG_PRECHANGE_KEY,
    CONFIG_STATISTICS_KEY,
    PRECHANGE_ESTIMATE_KEY,
    PRECHANGE_KNOWN_KEY,
    PRECHANGE_UNKNOWN_KEY,
)
from mdfocus.core.model import ModelSpec
from mdfocus.core.modes import ALLOWED_STAT_KINDS, StatKind
from mdfocus.core.utils import parse_list_from_str
from mdfocus.exceptions import ConfigError, InputError

ALLOWED_PARAMS = [CONFIG_STATISTICS_KEY, CONFIG_PRECHANGE_KEY]


class Statistic:
    """One monitored statistic: dense, ranked:s, thresholded:a or sum_of_max."""

    def __init__(self, kind: StatKind, param=None):
        self.kind = kind
        self.param = param
        if kind == StatKind.RANKED and (param is None or int(param) != param or param < 1):
            raise ConfigError(f"ranked statistics need an integer s >= 1, got {param}")
        if kind == StatKind.THRESHOLDED and not (param is not None and param >= 0):
            raise ConfigError(f"thresholded statistics need a >= 0, got {param}")
        if kind == StatKind.RANKED:
            self.param = int(param)
        elif kind == StatKind.THRESHOLDED:
            self.param = float(param)

    @classmethod
    def dense(cls):
        return cls(StatKind.DENSE)

    @classmethod
    def ranked(cls, s):
        return cls(StatKind.RANKED, s)

    @classmethod
    def thresholded(cls, a):
        return cls(StatKind.THRESHOLDED, a)

    @classmethod
    def sum_of_max(cls):
        return cls(StatKind.SUM_OF_MAX)

    @classmethod
    def parse(cls, name: str) -> "Statistic":
        """Parses `dense`, `ranked:2`, `thresholded:1.5` or `sum_of_max`."""
        kind, _, param = name.strip().partition(":")
        if kind not in ALLOWED_STAT_KINDS:
            raise ConfigError(
                f"statistic {name} must be one of " + ",".join(ALLOWED_STAT_KINDS)
            )
        kind = StatKind(kind)
        if kind in (StatKind.RANKED, StatKind.THRESHOLDED):
            if param == "":
                raise ConfigError(f"statistic {name} needs a parameter, e.g. {kind.value}:2")
            try:
                value = float(param)
            except ValueError:
                raise ConfigError(f"statistic {name} has a non-numeric parameter")
            return cls(kind, value)
        if param != "":
            raise ConfigError(f"statistic {name} takes no parameter")
        return cls(kind)

    @property
    def name(self) -> str:
        if self.kind == StatKind.RANKED:
            return f"ranked:{self.param}"
        if self.kind == StatKind.THRESHOLDED:
            return f"thresholded:{self.param:g}"
        return self.kind.value

    def __eq__(self, other):
        if not isinstance(other, Statistic):
            return NotImplemented
        return self.kind == other.kind and self.param == other.param

    def __hash__(self):
        return hash((self.kind, self.param))

    def __repr__(self):
        return f"<class Statistic: {self.name}>"


class Prechange:
    """Pre-change parameter: known natural parameter, unknown, or estimated from training rows."""

    def __init__(self, known=None, estimate: Optional[int] = None):
        if known is not None and estimate is not None:
            raise ConfigError("prechange cannot be both known and estimated")
        if estimate is not None and (int(estimate) != estimate or estimate < 1):
            raise ConfigError(f"prechange estimate={estimate} must be a positive row count")
        self.known = None if known is None else np.asarray(known, dtype=float).reshape(-1)
        self.estimate = None if estimate is None else int(estimate)

    @classmethod
    def unknown(cls):
        return cls()

    @property
    def is_known(self) -> bool:
        return self.known is not None or self.estimate is not None

    @classmethod
    def from_dict(cls, params) -> "Prechange":
        if params is None:
            return cls()
        if not isinstance(params, dict) or len(params) != 1:
            raise ConfigError(
                "prechange must be one of {known: [...]}, {unknown: true}, {estimate: k}"
            )
        (key, value), = params.items()
        if key == PRECHANGE_KNOWN_KEY:
            return cls(known=value)
        if key == PRECHANGE_ESTIMATE_KEY:
            return cls(estimate=value)
        if key == PRECHANGE_UNKNOWN_KEY:
            return cls()
        raise ConfigError(f"unknown prechange key {key}")

    def to_json_dict(self) -> Dict[str, Any]:
        if self.known is not None:
            return {PRECHANGE_KNOWN_KEY: self.known.tolist()}
        if self.estimate is not None:
            return {PRECHANGE_ESTIMATE_KEY: self.estimate}
        return {PRECHANGE_UNKNOWN_KEY: True}

    def __eq__(self, other):
        if not isinstance(other, Prechange):
            return NotImplemented
        return self.to_json_dict() == other.to_json_dict()

    def __repr__(self):
        return f"<class Prechange: {self.to_json_dict()}>"


class StatConfig:
    """Statistics to monitor and the pre-change setting.

    Attributes
    ----------
    statistics: list of Statistic, evaluated and decided in this order
    prechange: Prechange
    """

    def __init__(self, statistics: Sequence[Statistic] = None, prechange: Prechange = None):
        self.statistics = list(statistics) if statistics is not None else [Statistic.dense()]
        self.prechange = prechange if prechange is not None else Prechange()
        self._check()

    def _check(self):
        if len(self.statistics) == 0:
            raise ConfigError("at least one statistic must be configured")
        names = [s.name for s in self.statistics]
        if len(set(names)) != len(names):
            raise ConfigError(f"statistics {names} must be distinct")

    def validate(self, model: ModelSpec) -> "StatConfig":
        for stat in self.statistics:
            if stat.kind == StatKind.RANKED and stat.param > model.p:
                raise ConfigError(f"{stat.name} needs s <= p={model.p}")
            if model.is_mean_variance and stat.kind != StatKind.DENSE:
                raise ConfigError(f"{stat.name} is not available for the mean-variance model")
        if self.prechange.known is not None:
            try:
                model.check_eta(self.prechange.known)
            except InputError as e:
                raise ConfigError(f"prechange: {e}")
        return self

    @property
    def names(self) -> List[str]:
        return [s.name for s in self.statistics]

    @classmethod
    def from_dict(cls, params: Dict[str, Any]) -> "StatConfig":
        if not isinstance(params, dict):
            raise ConfigError(f"params={params} must be dict")
        if any([x not in ALLOWED_PARAMS for x in params]):
            raise ConfigError(
                "allowed params for statistics can only be one of " + ",".join(ALLOWED_PARAMS)
            )
        names = parse_list_from_str(params.get(CONFIG_STATISTICS_KEY, "dense"))
        return cls(
            statistics=[Statistic.parse(n) for n in names],
            prechange=Prechange.from_dict(params.get(CONFIG_PRECHANGE_KEY)),
        )

    @classmethod
    def from_json(cls, json_str: str) -> "StatConfig":
        return cls.from_dict(json.loads(json_str))

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            CONFIG_STATISTICS_KEY: self.names,
            CONFIG_PRECHANGE_KEY: self.prechange.to_json_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    def __eq__(self, other):
        if not isinstance(other, StatConfig):
            return NotImplemented
        return self.statistics == other.statistics and self.prechange == other.prechange

    def __repr__(self):
        return f"<class StatConfig: statistics={self.names}, prechange={self.prechange}>"


class StatValue:
    __slots__ = ("value", "tau", "evidence")

    def __init__(self, value: float, tau: Optional[int], evidence: np.ndarray):
        self.value = float(value)
        self.tau = None if tau is None else int(tau)
        self.evidence = evidence

    def __repr__(self):
        return f"<class StatValue: value={self.value}, tau={self.tau}>"


class StatisticReport:
    """Values of every configured statistic at time n, in configuration order."""

    def __init__(self, n: int, values: "OrderedDict[str, StatValue]", candidates: int):
        self.n = n
        self.values = values
        self.candidates = candidates

    def __getitem__(self, name) -> StatValue:
        return self.values[name]

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "stats": {k: {"value": v.value, "tau": v.tau} for k, v in self.values.items()},
            "candidates": self.candidates,
        }

    def __repr__(self):
        vals = {k: v.value for k, v in self.values.items()}
        return f"<class StatisticReport: n={self.n}, values={vals}, candidates={self.candidates}>"


def ranked_values(evidences, s_levels: Sequence[int]) -> List[float]:
    """Sum of the s largest evidences for each s, from one descending sort."""
    evidences = np.asarray(evidences, dtype=float).reshape(-1)
    p = evidences.shape[0]
    for s in s_levels:
        if s < 1 or s > p:
            raise ConfigError(f"sparsity level s={s} must lie in [1, {p}]")
    prefix = np.cumsum(-np.sort(-evidences))
    return [float(prefix[s - 1]) for s in s_levels]


def coordinate_glr(model: ModelSpec, eta, n: int, total, taus, cums) -> np.ndarray:
    """Per-coordinate twice-log likelihood ratios, shape (len(taus), p).

    With a known pre-change parameter eta the post-change segment is compared with eta;
    otherwise pre- and post-change segments are both maximized (taus must be >= 1).
    """
    taus = np.asarray(taus, dtype=float)
    post_counts = n - taus
    post_sums = total[None, :] - cums
    ratio = model.coordinate_maxloglik(post_counts, post_sums)
    if eta is not None:
        ratio -= model.coordinate_loglik_at(post_counts, post_sums, eta)
    else:
        ratio += model.coordinate_maxloglik(taus, cums)
        ratio -= model.coordinate_maxloglik(np.array([float(n)]), total[None, :])
    return np.maximum(ratio, 0.0)


def evaluate(statistics: Sequence[Statistic], taus, ratio, n: int) -> "OrderedDict[str, StatValue]":
    """Maximizes every statistic over the candidates; ties go to the smallest tau."""
    out = OrderedDict()
    k, p = ratio.shape
    if k == 0:
        for stat in statistics:
            out[stat.name] = StatValue(0.0, None, np.zeros(p))
        return out

    prefix = None
    for stat in statistics:
        if stat.kind == StatKind.SUM_OF_MAX:
            col_arg = np.argmax(ratio, axis=0)
            col_max = ratio[col_arg, np.arange(p)]
            best = int(np.argmax(col_max))
            out[stat.name] = StatValue(col_max.sum(), taus[col_arg[best]], col_max)
            continue
        if stat.kind == StatKind.DENSE:
            score = ratio.sum(axis=1)
        elif stat.kind == StatKind.RANKED:
            if prefix is None:
                prefix = np.cumsum(-np.sort(-ratio, axis=1), axis=1)
            score = prefix[:, stat.param - 1]
        else:
            a2 = stat.param * stat.param
            score = np.where(ratio >= a2, ratio, 0.0).sum(axis=1)
        i = int(np.argmax(score))
        out[stat.name] = StatValue(score[i], taus[i], ratio[i])
    return out
