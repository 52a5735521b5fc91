# Standard Library
from enum import Enum


class Family(Enum):
    GAUSSIAN_MEAN = "gaussian_mean"
    POISSON = "poisson"
    BINOMIAL = "binomial"
    EXPONENTIAL = "exponential"
    PARETO = "pareto"
    GAUSSIAN_MEAN_VARIANCE = "gaussian_mean_variance"


class EngineKind(Enum):
    EXACT = "exact"
    DYADIC = "dyadic"
    APPROX = "approx"


class StatKind(Enum):
    DENSE = "dense"
    RANKED = "ranked"
    THRESHOLDED = "thresholded"
    SUM_OF_MAX = "sum_of_max"


class ThresholdMode(Enum):
    ANALYTIC_ARL = "analytic-arl"
    ANALYTIC_FA = "analytic-fa"
    MONTE_CARLO = "monte-carlo"


class Provenance(Enum):
    ARL = "arl"
    FALSE_ALARM = "false_alarm"
    MONTE_CARLO = "monte_carlo"
    USER = "user"


ALLOWED_FAMILIES = [x.value for x in Family]
ALLOWED_ENGINES = [x.value for x in EngineKind]
ALLOWED_STAT_KINDS = [x.value for x in StatKind]
ALLOWED_THRESHOLD_MODES = [x.value for x in ThresholdMode]
ALLOWED_PROVENANCES = [x.value for x in Provenance]
