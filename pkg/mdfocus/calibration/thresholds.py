"""
Detection thresholds.

A ThresholdPlan maps every monitored statistic name to either a fixed threshold c (calibrated
for an average run length gamma) or a time-varying threshold c_n (controlling the probability
alpha of ever raising a false alarm). Plans are JSON documents:

    {
        "thresholds": {
            "dense": {"fixed": 41.2},
            "ranked:1": {"time_varying": {"kind": "rank1", "p": 10, "alpha": 0.05}}
        },
        "provenance": {"kind": "arl", "gamma": 5000}
    }

All logarithms are natural.
"""

# Standard Library
import json
import math
from collections import OrderedDict
from typing import Any, Dict, Optional, Sequence

# Third Party
from scipy.special import gammaln

# First Party
from mdfocus.core.config_constants import PLAN_PROVENANCE_KEY, PLAN_THRESHOLDS_KEY
from mdfocus.core.logger import get_logger
from mdfocus.core.modes import ALLOWED_PROVENANCES, Provenance, StatKind
from mdfocus.detectors.statistics import Statistic
from mdfocus.exceptions import ConfigError

logger = get_logger()

FA_RANK1 = "rank1"
FA_RANKED = "ranked"
FA_DENSE = "dense"
FA_THRESHOLDED = "thresholded"
ALLOWED_FA_KINDS = [FA_RANK1, FA_RANKED, FA_DENSE, FA_THRESHOLDED]

FIXED_KEY = "fixed"
TIME_VARYING_KEY = "time_varying"


def arl_threshold(s: int, p: int, gamma: float, m: int = 1) -> float:
    """Fixed threshold c_s(gamma) for the rank-s statistic when m sparsity levels are monitored."""
    if not 1 <= s <= p:
        raise ConfigError(f"sparsity s={s} must lie in [1, p={p}]")
    if gamma <= 1:
        raise ConfigError(f"gamma={gamma} must be > 1")
    if m < 1:
        raise ConfigError(f"number of monitored levels m={m} must be >= 1")
    zeta = 4 * math.log(gamma) + math.log(m) + 5 * math.log(2)
    if s < p:
        zeta += s * math.log(p)
    return s + 2 * zeta + 2 * math.sqrt(s * zeta)


def log_binomial(p: int, s: int) -> float:
    return float(gammaln(p + 1) - gammaln(s + 1) - gammaln(p - s + 1))


def false_alarm_threshold(kind: str, p: int, n: float, alpha: float, param=None) -> float:
    """Time-varying threshold c_n(alpha) with x = 4 log n - log alpha.

    kind is one of rank1, ranked (param s), dense or thresholded (param a). Times below 2 are
    evaluated at n = 2.
    """
    if kind not in ALLOWED_FA_KINDS:
        raise ConfigError(f"kind={kind} must be one of " + ",".join(ALLOWED_FA_KINDS))
    if not 0 < alpha <= 1:
        raise ConfigError(f"alpha={alpha} must lie in (0, 1]")
    x = 4 * math.log(max(n, 2)) - math.log(alpha)
    if kind == FA_RANK1:
        return 2 * x + 2 * math.log(2 * p)
    if kind == FA_THRESHOLDED:
        if param is None or param < 0:
            raise ConfigError(f"thresholded kind needs a >= 0, got {param}")
        return 4 * x + 6 * p * math.exp(-param * param / 8)
    s = p if kind == FA_DENSE else param
    if s is None or not 1 <= s <= p:
        raise ConfigError(f"sparsity s={s} must lie in [1, p={p}]")
    level = x + log_binomial(p, s)
    return 2 * level + 2 * math.sqrt(s * level) + s


def false_alarm_kind(stat: Statistic):
    """The (kind, param) of the false-alarm bound that covers a statistic."""
    if stat.kind == StatKind.DENSE:
        return FA_DENSE, None
    if stat.kind == StatKind.RANKED:
        return (FA_RANK1, None) if stat.param == 1 else (FA_RANKED, stat.param)
    if stat.kind == StatKind.THRESHOLDED:
        return FA_THRESHOLDED, stat.param
    raise ConfigError(f"no analytic threshold is available for {stat.name}")


def arl_threshold_from_false_alarm(kind: str, p: int, gamma: float, param=None) -> float:
    """Fixed threshold with run length at least gamma: c_N(alpha) with N = 2 gamma, alpha = 1/2."""
    if gamma <= 1:
        raise ConfigError(f"gamma={gamma} must be > 1")
    return false_alarm_threshold(kind, p, 2 * gamma, 0.5, param=param)


class FixedThreshold:
    def __init__(self, value: float):
        if not value >= 0:
            raise ConfigError(f"threshold {value} must be >= 0")
        self.value = float(value)

    def at(self, n: int) -> float:
        return self.value

    def to_json_dict(self):
        return {FIXED_KEY: self.value}

    def __eq__(self, other):
        return isinstance(other, FixedThreshold) and self.value == other.value

    def __repr__(self):
        return f"<class FixedThreshold: {self.value}>"


class TimeVaryingThreshold:
    """c_n(alpha) of a false-alarm bound, nondecreasing in n."""

    def __init__(self, kind: str, p: int, alpha: float, param=None):
        # evaluating once validates kind, p, alpha and param
        false_alarm_threshold(kind, p, 2, alpha, param=param)
        self.kind = kind
        self.p = int(p)
        self.alpha = float(alpha)
        self.param = param

    def at(self, n: int) -> float:
        return false_alarm_threshold(self.kind, self.p, n, self.alpha, param=self.param)

    def to_json_dict(self):
        body = {"kind": self.kind, "p": self.p, "alpha": self.alpha}
        if self.param is not None:
            body["param"] = self.param
        return {TIME_VARYING_KEY: body}

    def __eq__(self, other):
        if not isinstance(other, TimeVaryingThreshold):
            return False
        return self.to_json_dict() == other.to_json_dict()

    def __repr__(self):
        return f"<class TimeVaryingThreshold: {self.to_json_dict()[TIME_VARYING_KEY]}>"


def threshold_from_dict(body) -> Any:
    if isinstance(body, (int, float)):
        return FixedThreshold(body)
    if not isinstance(body, dict) or len(body) != 1:
        raise ConfigError(
            f"threshold {body} must be a number, {{fixed: c}} or {{time_varying: ...}}"
        )
    (key, value), = body.items()
    if key == FIXED_KEY:
        return FixedThreshold(value)
    if key == TIME_VARYING_KEY:
        try:
            return TimeVaryingThreshold(
                value["kind"], value["p"], value["alpha"], param=value.get("param")
            )
        except (KeyError, TypeError):
            raise ConfigError(f"time-varying threshold {value} needs kind, p and alpha")
    raise ConfigError(f"unknown threshold type {key}")


class ThresholdPlan:
    """Thresholds per statistic name, with the provenance of their calibration.

    Attributes
    ----------
    thresholds: OrderedDict of statistic name -> FixedThreshold or TimeVaryingThreshold
    provenance: dict with "kind" in arl, false_alarm, monte_carlo, user and its settings
    """

    def __init__(self, thresholds: Dict[str, Any], provenance: Optional[Dict[str, Any]] = None):
        self.thresholds = OrderedDict(
            (name, t if hasattr(t, "at") else threshold_from_dict(t))
            for name, t in thresholds.items()
        )
        self.provenance = dict(provenance) if provenance else {"kind": Provenance.USER.value}
        self._check()

    def _check(self):
        if self.provenance.get("kind") not in ALLOWED_PROVENANCES:
            raise ConfigError(
                "provenance kind must be one of " + ",".join(ALLOWED_PROVENANCES)
            )
        for name in self.thresholds:
            Statistic.parse(name)

    @classmethod
    def fixed(cls, values: Dict[str, float], provenance=None) -> "ThresholdPlan":
        return cls({k: FixedThreshold(v) for k, v in values.items()}, provenance)

    def covers(self, names: Sequence[str]) -> None:
        missing = [name for name in names if name not in self.thresholds]
        if missing:
            raise ConfigError(f"threshold plan has no threshold for {missing}")

    def value(self, name: str, n: int) -> float:
        if name not in self.thresholds:
            raise ConfigError(f"threshold plan has no threshold for {name}")
        return self.thresholds[name].at(n)

    @classmethod
    def from_dict(cls, params: Dict[str, Any]) -> "ThresholdPlan":
        if not isinstance(params, dict):
            raise ConfigError(f"params={params} must be dict")
        allowed = [PLAN_THRESHOLDS_KEY, PLAN_PROVENANCE_KEY]
        if any([x not in allowed for x in params]):
            raise ConfigError(
                "allowed params for a threshold plan can only be one of " + ",".join(allowed)
            )
        if PLAN_THRESHOLDS_KEY not in params:
            raise ConfigError(f"threshold plan needs a {PLAN_THRESHOLDS_KEY} block")
        return cls(params[PLAN_THRESHOLDS_KEY], params.get(PLAN_PROVENANCE_KEY))

    @classmethod
    def from_json(cls, json_str: str) -> "ThresholdPlan":
        return cls.from_dict(json.loads(json_str))

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            PLAN_THRESHOLDS_KEY: {k: t.to_json_dict() for k, t in self.thresholds.items()},
            PLAN_PROVENANCE_KEY: self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    def __eq__(self, other):
        if not isinstance(other, ThresholdPlan):
            return NotImplemented
        return self.to_json_dict() == other.to_json_dict()

    def __repr__(self):
        return (
            f"<class ThresholdPlan: thresholds={dict(self.thresholds)}, "
            f"provenance={self.provenance}>"
        )


def analytic_arl_plan(statistics: Sequence[Statistic], p: int, gamma: float) -> ThresholdPlan:
    """Fixed thresholds with average run length at least gamma.

    Dense and ranked statistics use c_s(gamma) with m the number of monitored sparsity levels;
    thresholded statistics use the false-alarm bound at N = 2 gamma, alpha = 1/2.
    """
    levels = [s for s in statistics if s.kind in (StatKind.DENSE, StatKind.RANKED)]
    m = max(len(levels), 1)
    values = OrderedDict()
    for stat in statistics:
        if stat.kind == StatKind.DENSE:
            values[stat.name] = arl_threshold(p, p, gamma, m)
        elif stat.kind == StatKind.RANKED:
            values[stat.name] = arl_threshold(stat.param, p, gamma, m)
        elif stat.kind == StatKind.THRESHOLDED:
            kind, param = false_alarm_kind(stat)
            values[stat.name] = arl_threshold_from_false_alarm(kind, p, gamma, param)
        else:
            raise ConfigError(f"no analytic threshold is available for {stat.name}")
    logger.info(f"ARL thresholds for gamma={gamma}, p={p}: {dict(values)}")
    return ThresholdPlan.fixed(values, {"kind": Provenance.ARL.value, "gamma": gamma})


def false_alarm_plan(
    statistics: Sequence[Statistic], p: int, alpha: float, split: bool = True
) -> ThresholdPlan:
    """Time-varying thresholds; with split, alpha is shared equally among the statistics."""
    level = alpha / len(statistics) if split else alpha
    thresholds = OrderedDict()
    for stat in statistics:
        kind, param = false_alarm_kind(stat)
        thresholds[stat.name] = TimeVaryingThreshold(kind, p, level, param=param)
    logger.info(f"false-alarm thresholds for alpha={alpha} (per statistic {level}), p={p}")
    return ThresholdPlan(
        thresholds, {"kind": Provenance.FALSE_ALARM.value, "alpha": alpha, "split": split}
    )
