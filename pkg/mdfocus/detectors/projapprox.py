"""
Large-p approximation: one candidate store per block of coordinates.

Each store prunes on the hull of (tau, cumulative sums of its block's columns) but keeps the
full cumulative sums, so statistics are still computed from full-dimension segment summaries
over the union of the stores' labels. The union is a subset of the exact candidate set, so
approximate values never exceed the exact ones.
"""

# Standard Library
import json
from multiprocessing.pool import ThreadPool
from typing import List, Optional, Sequence, Tuple

# Third Party
import numpy as np

# First Party
from mdfocus.core.config_constants import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    DEFAULT_HULL_TOL,
    DEFAULT_PTILDE,
)
from mdfocus.core.model import ModelSpec
from mdfocus.detectors.candidates import CandidateStore
from mdfocus.detectors.engine import Engine
from mdfocus.detectors.statistics import StatConfig
from mdfocus.exceptions import ConfigError


def default_plan(p: int, p_tilde: int) -> List[Tuple[int, ...]]:
    """Consecutive coordinate blocks of size p_tilde, the last one possibly smaller."""
    if not 1 <= p_tilde <= p:
        raise ConfigError(f"p_tilde={p_tilde} must lie in [1, p={p}]")
    return [tuple(range(start, min(start + p_tilde, p))) for start in range(0, p, p_tilde)]


class ProjectionPlan:
    """Coordinate subsets (0-based model coordinates) whose projected hulls are maintained."""

    def __init__(self, subsets: Sequence[Sequence[int]], p: int, p_tilde: Optional[int] = None):
        self.subsets = [tuple(int(i) for i in s) for s in subsets]
        self.p = p
        self.p_tilde = p_tilde if p_tilde is not None else max(len(s) for s in self.subsets)
        self._check()

    @classmethod
    def blocks(cls, p: int, p_tilde: int = DEFAULT_PTILDE) -> "ProjectionPlan":
        return cls(default_plan(p, p_tilde), p, p_tilde)

    def _check(self):
        if len(self.subsets) == 0:
            raise ConfigError("a projection plan needs at least one subset")
        for s in self.subsets:
            if len(s) == 0 or len(s) > self.p_tilde:
                raise ConfigError(f"subset {s} must have between 1 and {self.p_tilde} coordinates")
            if len(set(s)) != len(s) or min(s) < 0 or max(s) >= self.p:
                raise ConfigError(f"subset {s} must hold distinct coordinates in [0, {self.p})")
        covered = set(i for s in self.subsets for i in s)
        if covered != set(range(self.p)):
            missing = sorted(set(range(self.p)) - covered)
            raise ConfigError(f"coordinates {missing} are not covered by any subset")

    def natural_columns(self, model: ModelSpec) -> List[np.ndarray]:
        """Natural-statistic columns of every subset (two per mean-variance coordinate)."""
        if model.p != self.p:
            raise ConfigError(f"plan is for p={self.p}, model has p={model.p}")
        return [
            np.array([c for i in s for c in model.columns[i]], dtype=int) for s in self.subsets
        ]

    def to_json_dict(self):
        return {"subsets": [list(s) for s in self.subsets], "p": self.p, "ptilde": self.p_tilde}

    def to_json(self):
        return json.dumps(self.to_json_dict())

    def __eq__(self, other):
        if not isinstance(other, ProjectionPlan):
            return NotImplemented
        return self.subsets == other.subsets and self.p == other.p

    def __repr__(self):
        return f"<class ProjectionPlan: subsets={self.subsets}, p_tilde={self.p_tilde}>"


class ApproxEngine(Engine):
    """Engine keeping the union of candidates of projected hulls.

    With `workers > 1` the subset rebuilds of one step run on a thread pool; the step only
    returns once every subset is rebuilt.
    """

    def __init__(
        self,
        model: ModelSpec,
        config: StatConfig,
        plan: Optional[ProjectionPlan] = None,
        alpha: float = DEFAULT_ALPHA,
        beta: float = DEFAULT_BETA,
        tol: float = DEFAULT_HULL_TOL,
        workers: int = 1,
    ):
        super().__init__(model, config)
        if plan is None:
            plan = ProjectionPlan.blocks(model.p, min(DEFAULT_PTILDE, model.p))
        self.plan = plan
        self.stores = [
            CandidateStore(
                model.d_nat, len(cols) + 2, alpha=alpha, beta=beta, columns=cols, tol=tol
            )
            for cols in plan.natural_columns(model)
        ]
        self._pool = ThreadPool(workers) if workers > 1 else None
        self.logger.info(
            f"{self.engine_name}: {len(self.stores)} projected stores for subsets {plan.subsets}"
        )

    def _insert(self, tau, cum):
        for store in self.stores:
            store.append(tau, cum)

    def candidate_arrays(self):
        taus = np.concatenate([s.taus for s in self.stores])
        cums = np.vstack([s.cums for s in self.stores])
        taus, first = np.unique(taus, return_index=True)
        return taus, cums[first]

    def stored_labels(self) -> int:
        """Labels held across all stores, duplicates counted."""
        return sum(len(s) for s in self.stores)

    def _after_evaluate(self):
        due = [s for s in self.stores if s.needs_rebuild]
        if not due:
            return
        if self._pool is not None and len(due) > 1:
            dropped = self._pool.map(CandidateStore.rebuild, due)
        else:
            dropped = [s.rebuild() for s in due]
        self.logger.debug(
            f"n={self.n}: rebuilt {len(due)} projected stores, dropped {sum(dropped)} labels"
        )

    def close(self):
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None
