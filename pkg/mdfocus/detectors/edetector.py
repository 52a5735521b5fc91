"""
CUSUM e-detectors as a hull problem.

For a score map s and a variance map v, the log CUSUM e-detector at time n with multiplier
lambda is

    max_{tau < n} sum_{t=tau+1}^{n} (lambda s(x_t) - psi(lambda) v(x_t))
        = max_{tau < n} 2 lambda (b_n - b_tau) - psi(lambda) (a_n - a_tau)

with a_tau = sum_{t<=tau} v(x_t) and b_tau = sum_{t<=tau} s(x_t) / 2. It is a linear function
of the point (a_tau, b_tau), so for every lambda the maximizing tau is a vertex of the convex
hull of these points.
"""

# Standard Library
import math
from typing import Callable, List, Optional, Sequence, Tuple

# Third Party
import numpy as np

# First Party
from mdfocus.core.config_constants import DEFAULT_HULL_TOL
from mdfocus.core.hull import HullPoint, hull_vertex_labels
from mdfocus.exceptions import ConfigError, InputError

WINNING_RATE = "winning-rate"
PLUS_MINUS = "plus-minus"
ALLOWED_PRESETS = [WINNING_RATE, PLUS_MINUS]


def default_psi(lam: float) -> float:
    """psi(lambda) = -log(1 - lambda) - lambda, defined for lambda < 1."""
    if lam >= 1:
        raise InputError(f"psi is only defined for lambda < 1, got {lam}")
    return -math.log1p(-lam) - lam


class EDetectorSpec:
    """Score and variance maps of an e-detector, applied elementwise to numpy arrays."""

    def __init__(
        self,
        score: Callable[[np.ndarray], np.ndarray],
        variance: Callable[[np.ndarray], np.ndarray],
        psi: Callable[[float], float] = default_psi,
        name: str = "custom",
    ):
        self.score = score
        self.variance = variance
        self.psi = psi
        self.name = name

    @classmethod
    def winning_rate(cls, p0: float = 0.49) -> "EDetectorSpec":
        """s(x) = 1{x > 0} - p0 and v(x) = 1 on raw score differences x."""
        return cls(
            score=lambda x: (x > 0).astype(float) - p0,
            variance=lambda x: np.ones(x.shape[0]),
            name=WINNING_RATE,
        )

    @classmethod
    def plus_minus(cls, m: float = 0.494, shift: float = 80, scale: float = 160) -> "EDetectorSpec":
        """s = x'/m - 1 and v = s^2 with x' = (x + shift) / scale."""

        def score(x):
            return ((x + shift) / scale) / m - 1

        return cls(score=score, variance=lambda x: score(x) ** 2, name=PLUS_MINUS)

    @classmethod
    def preset(cls, name: str, **kwargs) -> "EDetectorSpec":
        if name == WINNING_RATE:
            return cls.winning_rate(**kwargs)
        if name == PLUS_MINUS:
            return cls.plus_minus(**kwargs)
        raise ConfigError(f"preset {name} must be one of " + ",".join(ALLOWED_PRESETS))

    def maps(self, stream) -> Tuple[np.ndarray, np.ndarray]:
        x = np.asarray(stream, dtype=float).reshape(-1)
        s = np.asarray(self.score(x), dtype=float)
        v = np.asarray(self.variance(x), dtype=float)
        if np.any(v < 0):
            raise InputError(f"variance map of {self.name} returned negative values")
        return s, v

    def __repr__(self):
        return f"<class EDetectorSpec: {self.name}>"


def cumulative_points(spec: EDetectorSpec, stream) -> Tuple[np.ndarray, np.ndarray]:
    """a_tau and b_tau for tau = 0, ..., n."""
    s, v = spec.maps(stream)
    a = np.concatenate([[0.0], np.cumsum(v)])
    b = np.concatenate([[0.0], np.cumsum(s) / 2])
    return a, b


def edetector_points(spec: EDetectorSpec, stream) -> List[HullPoint]:
    """Points (a_tau, b_tau) of every candidate tau = 0, ..., n-1 for a stream of length n."""
    if len(stream) == 0:
        raise InputError("e-detector points need a nonempty stream")
    a, b = cumulative_points(spec, stream)
    return [HullPoint(tau, (a[tau], b[tau])) for tau in range(len(stream))]


def cusum_argmax(
    spec: EDetectorSpec,
    stream,
    lam: float,
    psi_of_lambda: Optional[float] = None,
    candidates: Optional[Sequence[int]] = None,
) -> Tuple[float, int]:
    """Maximal log CUSUM value at n = len(stream) and its smallest maximizing tau.

    candidates restricts tau (e.g. to hull vertex labels); by default every tau < n is scanned.
    """
    if len(stream) == 0:
        raise InputError("the e-detector needs a nonempty stream")
    if psi_of_lambda is None:
        psi_of_lambda = spec.psi(lam)
    a, b = cumulative_points(spec, stream)
    n = len(stream)
    taus = np.arange(n) if candidates is None else np.asarray(candidates, dtype=int)
    values = 2 * lam * (b[n] - b[taus]) - psi_of_lambda * (a[n] - a[taus])
    i = int(np.argmax(values))
    return float(values[i]), int(taus[i])


def cusum_log_value(spec, stream, lam, psi_of_lambda=None, candidates=None) -> float:
    return cusum_argmax(spec, stream, lam, psi_of_lambda, candidates)[0]


def edetector_trace(spec: EDetectorSpec, stream, tol: float = DEFAULT_HULL_TOL):
    """Yields (n, hull vertex labels of tau < n) for n = 1, ..., len(stream).

    The hull is maintained incrementally: vertices of all points are always among the previous
    vertices plus the new point.
    """
    a, b = cumulative_points(spec, stream)
    kept = np.zeros(0, dtype=int)
    for n in range(1, len(stream) + 1):
        labels = np.append(kept, n - 1)
        kept = hull_vertex_labels(labels, np.column_stack([a[labels], b[labels]]), tol=tol)
        yield n, kept.tolist()
