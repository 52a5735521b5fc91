"""
Null simulators of integer plus-minus score streams (points scored minus points conceded).

None of them contains a change. The Poisson and negative-binomial differences can carry a
time-varying mean added to the scoring team's mean, either an AR(1) path or a sine wave.
"""

# Standard Library
from typing import Optional, Sequence

# Third Party
import numpy as np

# First Party
from mdfocus.exceptions import ConfigError

POISSON_DIFFERENCE = "poisson"
NEGBIN_DIFFERENCE = "negbin"
UNIFORM = "uniform"
RESAMPLE = "resample"
ALLOWED_SIMULATORS = [POISSON_DIFFERENCE, NEGBIN_DIFFERENCE, UNIFORM, RESAMPLE]

DEPENDENCE_AR1 = "ar1"
DEPENDENCE_SINE = "sine"
ALLOWED_DEPENDENCE = [DEPENDENCE_AR1, DEPENDENCE_SINE]


def ar1_path(n: int, rng: np.random.Generator, phi: float = 0.6, scale: float = 5.0) -> np.ndarray:
    """Stationary AR(1) path with autocorrelation phi and marginal standard deviation scale."""
    if not -1 < phi < 1:
        raise ConfigError(f"phi={phi} must lie in (-1, 1)")
    innovations = rng.standard_normal(n) * scale * np.sqrt(1 - phi * phi)
    path = np.empty(n)
    previous = rng.standard_normal() * scale
    for t in range(n):
        previous = phi * previous + innovations[t]
        path[t] = previous
    return path


def sine_path(n: int, period: float = 20, amplitude: float = 5.0, phase: float = 0.0) -> np.ndarray:
    return amplitude * np.sin(2 * np.pi * np.arange(n) / period + phase)


def varying_mean(
    n: int, mean: float, rng: np.random.Generator, dependence: Optional[str] = None, **kwargs
) -> np.ndarray:
    if dependence is None:
        return np.full(n, float(mean))
    if dependence == DEPENDENCE_AR1:
        extra = ar1_path(n, rng, **kwargs)
    elif dependence == DEPENDENCE_SINE:
        extra = sine_path(n, **kwargs)
    else:
        raise ConfigError(f"dependence={dependence} must be one of " + ",".join(ALLOWED_DEPENDENCE))
    # rates must stay positive
    return np.maximum(mean + extra, 1e-6)


def poisson_difference(
    n: int, rng: np.random.Generator, mean: float = 105, dependence: Optional[str] = None, **kwargs
) -> np.ndarray:
    scored = rng.poisson(varying_mean(n, mean, rng, dependence, **kwargs))
    conceded = rng.poisson(mean, size=n)
    return (scored - conceded).astype(float)


def negbin_difference(
    n: int,
    rng: np.random.Generator,
    mean: float = 105,
    size: float = 2,
    dependence: Optional[str] = None,
    **kwargs,
) -> np.ndarray:
    """Difference of negative binomials with the given mean and size (scale) parameter."""
    if not size > 0:
        raise ConfigError(f"size={size} must be positive")
    rates = varying_mean(n, mean, rng, dependence, **kwargs)
    scored = rng.negative_binomial(size, size / (size + rates))
    conceded = rng.negative_binomial(size, size / (size + mean), size=n)
    return (scored - conceded).astype(float)


def uniform_scores(n: int, rng: np.random.Generator, low: int = -80, high: int = 80) -> np.ndarray:
    return rng.integers(low, high + 1, size=n).astype(float)


def resample_scores(n: int, rng: np.random.Generator, history: Sequence[float]) -> np.ndarray:
    history = np.asarray(history, dtype=float)
    if history.shape[0] == 0:
        raise ConfigError("resampling needs a nonempty score history")
    return rng.choice(history, size=n, replace=True)


def simulate(kind: str, n: int, rng: np.random.Generator, **kwargs) -> np.ndarray:
    """Dispatches to one of the null simulators by name."""
    if kind == POISSON_DIFFERENCE:
        return poisson_difference(n, rng, **kwargs)
    if kind == NEGBIN_DIFFERENCE:
        return negbin_difference(n, rng, **kwargs)
    if kind == UNIFORM:
        return uniform_scores(n, rng, **kwargs)
    if kind == RESAMPLE:
        return resample_scores(n, rng, **kwargs)
    raise ConfigError(f"simulator {kind} must be one of " + ",".join(ALLOWED_SIMULATORS))
