# Standard Library
import math
from typing import List, Optional, Sequence

# Third Party
import numpy as np

# First Party
from mdfocus.core.config_constants import DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_HULL_TOL
from mdfocus.core.hull import extreme_indices
from mdfocus.exceptions import ConfigError, InvariantViolation


class Candidate:
    """A putative changepoint tau with the cumulative natural statistic up to tau."""

    __slots__ = ("tau", "cum")

    def __init__(self, tau: int, cum):
        self.tau = int(tau)
        self.cum = np.asarray(cum, dtype=float)

    def point(self) -> np.ndarray:
        return np.concatenate([[float(self.tau)], self.cum])

    def __repr__(self):
        return f"<class Candidate: tau={self.tau}, cum={self.cum.tolist()}>"


class CandidateStore:
    """Candidates in increasing tau order with the lazy rebuild schedule.

    The store is pruned to the vertices of the hull of its points only once it holds more
    than `max_size` candidates; afterwards `max_size = floor(alpha * size + beta)`.

    Attributes
    ----------
    alpha: float >= 1
    beta: float >= 0
    max_size: current rebuild trigger
    columns: natural-statistic columns used for the hull (all columns when None)
    """

    def __init__(
        self,
        d_nat: int,
        max_size: int,
        alpha: float = DEFAULT_ALPHA,
        beta: float = DEFAULT_BETA,
        columns: Optional[Sequence[int]] = None,
        tol: float = DEFAULT_HULL_TOL,
    ):
        if alpha < 1:
            raise ConfigError(f"alpha={alpha} must be >= 1")
        if beta < 0:
            raise ConfigError(f"beta={beta} must be >= 0")
        if max_size < 1:
            raise ConfigError(f"max_size={max_size} must be positive")
        self.d_nat = d_nat
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.max_size = int(max_size)
        self.columns = None if columns is None else np.asarray(columns, dtype=int)
        self.tol = tol
        self.rebuilds = 0
        self._taus = np.empty(8, dtype=np.int64)
        self._cums = np.empty((8, d_nat))
        self._size = 0

    def __len__(self):
        return self._size

    @property
    def taus(self) -> np.ndarray:
        return self._taus[: self._size]

    @property
    def cums(self) -> np.ndarray:
        return self._cums[: self._size]

    def append(self, tau: int, cum) -> None:
        if self._size and tau <= self._taus[self._size - 1]:
            raise InvariantViolation(
                f"candidate {tau} does not follow {self._taus[self._size - 1]}"
            )
        if self._size == self._taus.shape[0]:
            self._taus = np.concatenate([self._taus, np.empty_like(self._taus)])
            self._cums = np.vstack([self._cums, np.empty_like(self._cums)])
        self._taus[self._size] = tau
        self._cums[self._size] = cum
        self._size += 1

    def keep(self, idx) -> None:
        """Retains the rows idx (increasing)."""
        idx = np.asarray(idx, dtype=np.int64)
        kept = idx.shape[0]
        self._taus[:kept] = self._taus[idx]
        self._cums[:kept] = self._cums[idx]
        self._size = kept

    def points(self) -> np.ndarray:
        cums = self.cums if self.columns is None else self.cums[:, self.columns]
        return np.column_stack([self.taus.astype(float), cums])

    def hull_indices(self) -> np.ndarray:
        return extreme_indices(self.taus, self.points(), tol=self.tol)

    @property
    def needs_rebuild(self) -> bool:
        return self._size > self.max_size

    def rebuild(self) -> int:
        """Prunes to hull vertices and resets max_size; returns the number of candidates dropped."""
        before = self._size
        self.keep(self.hull_indices())
        self.max_size = int(math.floor(self.alpha * self._size + self.beta))
        self.rebuilds += 1
        return before - self._size

    def candidates(self) -> List[Candidate]:
        return [Candidate(t, c.copy()) for t, c in zip(self.taus, self.cums)]

    def __repr__(self):
        return (
            f"<class CandidateStore: size={self._size}, max_size={self.max_size}, "
            f"alpha={self.alpha}, beta={self.beta}>"
        )
