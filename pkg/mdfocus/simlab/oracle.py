"""
Brute-force references for the online engines: every statistic recomputed at every n by
scanning all candidate changepoints, and hull vertices of all points P(tau).

`likelihood_ratio_evidence` does not share any code with the engines: it evaluates segment
log-likelihoods of the raw observations with scipy.stats densities at their fitted parameters.
"""

# Standard Library
from typing import List, Optional

# Third Party
import numpy as np
from scipy import stats
from scipy.special import expit

# First Party
from mdfocus.core.config_constants import DEFAULT_HULL_TOL
from mdfocus.core.hull import hull_vertex_labels
from mdfocus.core.model import ModelSpec
from mdfocus.core.modes import Family
from mdfocus.detectors.statistics import StatConfig, StatisticReport, coordinate_glr, evaluate
from mdfocus.exceptions import ConfigError

MAX_ORACLE_LENGTH = 5000


def as_stream(stream) -> np.ndarray:
    """Rows are time steps; a flat sequence is a univariate stream."""
    stream = np.asarray(stream, dtype=float)
    return stream.reshape(-1, 1) if stream.ndim == 1 else stream


def prefix_sums(stream) -> np.ndarray:
    """Cumulative sums with a leading zero row: row tau is the sum of the first tau rows."""
    stream = as_stream(stream)
    return np.vstack([np.zeros((1, stream.shape[1])), np.cumsum(stream, axis=0)])


def all_candidates(n: int, known: bool) -> np.ndarray:
    return np.arange(0 if known else 1, n)


def brute_force_glr(
    model: ModelSpec, config: StatConfig, stream, eta=None
) -> List[StatisticReport]:
    """Reports for n = 1, ..., len(stream), maximizing over every candidate tau < n.

    eta overrides the configured known pre-change parameter; without either the pre-change
    parameter is treated as unknown.
    """
    config.validate(model)
    if eta is None and config.prechange.known is not None:
        eta = config.prechange.known
    if config.prechange.estimate is not None and eta is None:
        raise ConfigError("pass the estimated pre-change parameter as eta")
    stream = np.asarray(stream, dtype=float).reshape(-1, model.d_nat)
    if stream.shape[0] > MAX_ORACLE_LENGTH:
        raise ConfigError(f"the quadratic oracle is limited to {MAX_ORACLE_LENGTH} steps")
    cums = prefix_sums(stream)
    reports = []
    for n in range(1, stream.shape[0] + 1):
        taus = all_candidates(n, eta is not None)
        ratio = coordinate_glr(model, eta, n, cums[n], taus, cums[taus])
        values = evaluate(config.statistics, taus, ratio, n)
        reports.append(StatisticReport(n, values, taus.shape[0]))
    return reports


def lifted_points(stream, labels) -> np.ndarray:
    """P(tau) = (tau, cumulative sum up to tau) for the given labels."""
    cums = prefix_sums(stream)
    labels = np.asarray(labels, dtype=int)
    return np.column_stack([labels.astype(float), cums[labels]])


def brute_force_hull(
    stream,
    n: Optional[int] = None,
    known: bool = True,
    tol: float = DEFAULT_HULL_TOL,
    method: str = "lp",
) -> np.ndarray:
    """Hull vertex labels of all P(tau), tau < n (tau >= 1 when known is False)."""
    stream = as_stream(stream)
    if n is None:
        n = stream.shape[0]
    labels = all_candidates(n, known)
    if labels.shape[0] == 0:
        return labels
    return hull_vertex_labels(labels, lifted_points(stream, labels), tol=tol, method=method)


def _segment_loglik(family, y, eta=None) -> float:
    """Log-likelihood of the raw segment y, at eta or at the segment's own fit."""
    kind = family.family
    if kind == Family.GAUSSIAN_MEAN:
        loc = y.mean() if eta is None else eta
        return float(stats.norm.logpdf(y, loc=loc).sum())
    if kind == Family.POISSON:
        mu = max(y.mean(), np.finfo(float).tiny) if eta is None else np.exp(eta)
        return float(stats.poisson.logpmf(y, mu).sum())
    if kind == Family.BINOMIAL:
        theta = y.mean() / family.trials if eta is None else expit(eta)
        return float(stats.binom.logpmf(y, family.trials, theta).sum())
    if kind == Family.EXPONENTIAL:
        scale = y.mean() if eta is None else -1.0 / eta
        return float(stats.expon.logpdf(y, scale=scale).sum())
    if kind == Family.PARETO:
        shape = 1.0 / np.log(y / family.y_min).mean() if eta is None else -1.0 - eta
        return float(stats.pareto.logpdf(y, shape, scale=family.y_min).sum())
    raise ConfigError(f"no reference likelihood for the {kind.value} family")


def likelihood_ratio_evidence(model: ModelSpec, observations, n: Optional[int] = None, eta=None):
    """Candidate labels and twice the log-likelihood ratio of every coordinate at time n.

    Row i of the evidence matrix belongs to tau = labels[i]. With eta the post-change fit over
    (tau, n] is compared with eta; without it the pre- and post-change fits are compared with
    one fit over all n rows, for tau >= 1.
    """
    if model.d_nat != model.p:
        raise ConfigError("the reference likelihoods cover one-parameter families only")
    observations = np.asarray(observations, dtype=float).reshape(-1, model.p)
    if n is None:
        n = observations.shape[0]
    if eta is not None:
        eta = model.check_eta(eta)
    labels = all_candidates(n, eta is not None)
    evidence = np.zeros((labels.shape[0], model.p))
    for j, family in enumerate(model.coords):
        y = observations[:n, j]
        whole = None if eta is not None else _segment_loglik(family, y)
        for i, tau in enumerate(labels):
            post = _segment_loglik(family, y[tau:])
            if eta is not None:
                ratio = post - _segment_loglik(family, y[tau:], eta[j])
            else:
                ratio = _segment_loglik(family, y[:tau]) + post - whole
            evidence[i, j] = max(2 * ratio, 0.0)
    return labels, evidence
