"""
Dyadic candidate maintenance.

Candidates {1, ..., n-1} are split by the binary digits of n-1 into chunks

    U_n^q = (sum_{j>q} digit_j 2^j, sum_{j>=q} digit_j 2^j]

and each chunk of scale q >= q_min only keeps the vertices of its own hull. Inserting label n
merges the chunks that complete at n: while 2^q divides n, the labels above n - 2^q are
replaced by the vertices of their hull.
"""

# Standard Library
from typing import Optional, Tuple

# Third Party
import numpy as np

# First Party
from mdfocus.core.config_constants import DEFAULT_HULL_TOL, DEFAULT_QMIN_OFFSET
from mdfocus.core.hull import extreme_indices
from mdfocus.core.model import ModelSpec
from mdfocus.detectors.candidates import CandidateStore
from mdfocus.detectors.engine import Engine
from mdfocus.detectors.statistics import StatConfig
from mdfocus.exceptions import ConfigError, InputError


def chunk_bounds(n: int, q: int) -> Tuple[int, int]:
    """Half-open label range [start, stop) of U_n^q (empty when start == stop)."""
    if n < 2:
        raise InputError(f"chunks are defined for n >= 2, got n={n}")
    top = (n - 1).bit_length() - 1
    if q < 0 or q > top:
        raise InputError(f"q={q} must lie in [0, {top}] for n={n}")
    m = n - 1
    high = (m >> (q + 1)) << (q + 1)
    digit = (m >> q) & 1
    return high + 1, high + digit * (1 << q) + 1


def trailing_block(n: int, q_min: int) -> Tuple[int, int]:
    """Labels of {1, ..., n-1} not covered by chunks of scale >= q_min, as [start, stop)."""
    m = n - 1
    return ((m >> q_min) << q_min) + 1, n


class DyadicState:
    """Candidate labels and cumulative sums maintained by dyadic chunk hulls.

    Attributes
    ----------
    q_min: smallest chunk scale that is pruned
    store: labels and cumulative sums, increasing labels
    """

    def __init__(self, d_nat: int, q_min: int, tol: float = DEFAULT_HULL_TOL):
        if q_min < 1:
            raise ConfigError(f"q_min={q_min} must be >= 1")
        self.q_min = q_min
        self.tol = tol
        self.hull_calls = 0
        # the schedule of a plain store is not used here, only its buffers
        self.store = CandidateStore(d_nat, max_size=1)

    @property
    def labels(self) -> np.ndarray:
        return self.store.taus

    def __repr__(self):
        return f"<class DyadicState: q_min={self.q_min}, candidates={len(self.store)}>"


def dyadic_update(state: DyadicState, n: int, cum) -> DyadicState:
    """Inserts label n and merges every chunk completed at n."""
    if n < 1:
        raise InputError(f"dyadic labels start at 1, got {n}")
    store = state.store
    store.append(n, cum)
    d_nat = store.d_nat
    q = state.q_min
    while n % (1 << q) == 0:
        taus = store.taus
        start = int(np.searchsorted(taus, n - (1 << q), side="right"))
        if len(store) - start > d_nat + 2:
            chunk = np.arange(start, len(store))
            points = np.column_stack([taus[chunk].astype(float), store.cums[chunk]])
            kept = chunk[extreme_indices(taus[chunk], points, tol=state.tol)]
            store.keep(np.concatenate([np.arange(start), kept]))
            state.hull_calls += 1
        q += 1
    return state


class DyadicEngine(Engine):
    """Exact engine whose candidates follow the dyadic chunk schedule."""

    def __init__(
        self,
        model: ModelSpec,
        config: StatConfig,
        q_min: Optional[int] = None,
        tol: float = DEFAULT_HULL_TOL,
    ):
        super().__init__(model, config)
        if q_min is None:
            q_min = model.p + DEFAULT_QMIN_OFFSET
        self.state = DyadicState(model.d_nat, q_min, tol=tol)

    def _insert(self, tau, cum):
        if tau == 0:
            # the origin stays a candidate for good, outside every chunk
            self.state.store.append(0, cum)
        else:
            dyadic_update(self.state, tau, cum)

    def candidate_arrays(self):
        return self.state.store.taus, self.state.store.cums
