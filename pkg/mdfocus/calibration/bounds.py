"""
Upper bounds on detection delays for a change of squared size ||delta||^2.
"""

# Standard Library
import math
from typing import Optional

# Third Party
import numpy as np

# First Party
from mdfocus.exceptions import ConfigError, InfiniteDelay

DD_BASIC = "basic"
DD_CENTERED = "centered"
DD_CENTERED_WIDE = "centered_wide"
ALLOWED_DD_VARIANTS = [DD_BASIC, DD_CENTERED, DD_CENTERED_WIDE]


def _check_change(delta_norm2):
    if not delta_norm2 > 0:
        raise InfiniteDelay(delta_norm2)


def add_bound(
    c: float, delta_norm2: float, thresholded_a: Optional[float] = None, p: Optional[int] = None
) -> float:
    """Average detection delay bound of a fixed-threshold statistic.

    For a thresholded statistic, c is replaced by c + p a^2 (p is then required).
    """
    _check_change(delta_norm2)
    if c < 0:
        raise ConfigError(f"threshold c={c} must be >= 0")
    if thresholded_a is not None:
        if p is None:
            raise ConfigError("the thresholded delay bound needs p")
        c = c + p * thresholded_a * thresholded_a
    return (c + math.sqrt(delta_norm2) * math.sqrt(8 / math.pi)) / delta_norm2 + 1


def dd_bound(
    c: float, p_or_s: int, delta_norm2: float, alpha: float, variant: str = DD_BASIC
) -> float:
    """Delay T - tau* that holds with probability at least 1 - alpha.

    For a rank-s statistic pass s and the squared norm of the s largest changes. The centered
    variants need c > p_or_s; centered_wide doubles the square-root term.
    """
    if variant not in ALLOWED_DD_VARIANTS:
        raise ConfigError(f"variant={variant} must be one of " + ",".join(ALLOWED_DD_VARIANTS))
    _check_change(delta_norm2)
    if not alpha > 0:
        raise ConfigError(f"alpha={alpha} must be > 0")
    if variant == DD_BASIC:
        return (2 * c - 8 * math.log(alpha / 2)) / delta_norm2
    if c <= p_or_s:
        raise ConfigError(f"centered bound needs c={c} > {p_or_s}")
    root = 2 if variant == DD_CENTERED else 4
    spread = root * math.sqrt(p_or_s * math.log(3 / alpha))
    return (2 * (c - p_or_s) + spread - 8 * math.log(alpha / 3)) / delta_norm2


class DelayBound:
    """A detection-delay bound evaluated for one statistic and change."""

    def __init__(self, statistic: str, delta_norm2: float, alpha: float, value: float):
        self.statistic = statistic
        self.delta_norm2 = float(delta_norm2)
        self.alpha = float(alpha)
        self.value = float(value)

    @classmethod
    def evaluate(cls, statistic, c, p_or_s, delta_norm2, alpha, variant=DD_BASIC) -> "DelayBound":
        return cls(statistic, delta_norm2, alpha, dd_bound(c, p_or_s, delta_norm2, alpha, variant))

    def to_json_dict(self):
        return {
            "statistic": self.statistic,
            "delta_norm2": self.delta_norm2,
            "alpha": self.alpha,
            "value": self.value,
        }

    def __repr__(self):
        return f"<class DelayBound: {self.to_json_dict()}>"


def ranked_norm2(delta, s: int) -> float:
    """Squared norm of the s largest components of delta in absolute value."""
    sq = np.sort(np.asarray(delta, dtype=float) ** 2)[::-1]
    if not 1 <= s <= sq.shape[0]:
        raise ConfigError(f"s={s} must lie in [1, {sq.shape[0]}]")
    return float(sq[:s].sum())


def effective_sparsity(delta) -> int:
    """Smallest z in {1, 2, 4, ...} with at least z coordinates above ||delta|| / (z log2 p)."""
    delta = np.abs(np.asarray(delta, dtype=float))
    p = delta.shape[0]
    norm = float(np.sqrt(np.sum(delta ** 2)))
    _check_change(norm * norm)
    if p == 1:
        return 1
    log2p = math.log2(p)
    z = 1
    while z <= p:
        if np.count_nonzero(delta > norm / (z * log2p)) >= z:
            return z
        z *= 2
    return z // 2


def thresholded_dd_bound(c: float, a: float, delta, alpha: float) -> float:
    """Delay bound of the thresholded statistic in terms of the effective sparsity of delta."""
    delta = np.asarray(delta, dtype=float)
    p = delta.shape[0]
    if p < 2:
        raise ConfigError("the effective-sparsity bound needs p >= 2")
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha={alpha} must lie in (0, 1)")
    norm2 = float(np.sum(delta ** 2))
    z = effective_sparsity(delta)
    union = -8 * math.log(alpha) + 8 * math.log(2 * (z + 1))
    whole = (2 * c + union) / norm2
    single = (2 * a * a + union) / (norm2 / z)
    return math.log2(p) * max(whole, single)
