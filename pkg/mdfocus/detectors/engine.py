# Standard Library
from abc import ABC, abstractmethod
from typing import Callable, Optional, Tuple

# Third Party
import numpy as np

# First Party
from mdfocus.core.config_constants import DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_HULL_TOL
from mdfocus.core.logger import get_logger
from mdfocus.core.model import ModelSpec, SegmentSummary, to_natural
from mdfocus.core.utils import as_finite_vector
from mdfocus.detectors.candidates import CandidateStore
from mdfocus.detectors.statistics import StatConfig, StatisticReport, coordinate_glr, evaluate


# Online detector interface
class Engine(ABC):
    """Sequential single-stream detector.

    Subclasses only decide which candidates are kept; statistics are always evaluated from
    the candidates' cumulative sums against the running total. With `prechange.estimate = k`
    the first k observations train the pre-change parameter and produce no report.
    """

    def __init__(self, model: ModelSpec, config: StatConfig):
        self.model = model
        self.config = config.validate(model)
        self.logger = get_logger()
        self.engine_name = self.__class__.__name__
        self.eta = None
        if config.prechange.known is not None:
            self.eta = model.check_eta(config.prechange.known)
        self._training_left = config.prechange.estimate or 0
        self._training = np.zeros(model.d_nat)
        self.n = 0
        self.total = np.zeros(model.d_nat)

    @property
    def is_known(self) -> bool:
        return self.config.prechange.is_known

    @property
    def training(self) -> bool:
        return self._training_left > 0

    @abstractmethod
    def _insert(self, tau: int, cum: np.ndarray) -> None:
        """Adds candidate tau before the statistics at time n are evaluated."""

    @abstractmethod
    def candidate_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """Current candidate labels (increasing) and their cumulative sums."""

    def _after_evaluate(self) -> None:
        pass

    @property
    def n_candidates(self) -> int:
        return self.candidate_arrays()[0].shape[0]

    def _train(self, x):
        self._training += x
        self._training_left -= 1
        if self._training_left == 0:
            seg_count = self.config.prechange.estimate
            self.eta = self.model.mle(SegmentSummary(seg_count, self._training))
            self.logger.info(
                f"{self.engine_name}: pre-change parameter estimated from {seg_count} rows: "
                f"{self.eta.tolist()}"
            )

    def step(self, x) -> Optional[StatisticReport]:
        """Processes one natural-statistic vector and returns the report at the new time n."""
        x = as_finite_vector(x, self.model.d_nat)
        if self.training:
            self._train(x)
            return None
        tau = self.n
        if self.is_known or tau >= 1:
            self._insert(tau, self.total.copy())
        self.n += 1
        self.total += x
        taus, cums = self.candidate_arrays()
        ratio = coordinate_glr(self.model, self.eta, self.n, self.total, taus, cums)
        values = evaluate(self.config.statistics, taus, ratio, self.n)
        report = StatisticReport(self.n, values, taus.shape[0])
        self._after_evaluate()
        return report

    def observe(self, y) -> Optional[StatisticReport]:
        """Like step but takes a raw observation."""
        return self.step(to_natural(self.model, y))

    def close(self) -> None:
        """Releases worker resources; engines stay usable for reading their state."""

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


class MdFocusEngine(Engine):
    """Exact engine: lazy hull rebuilds on the alpha/beta schedule."""

    def __init__(
        self,
        model: ModelSpec,
        config: StatConfig,
        alpha: float = DEFAULT_ALPHA,
        beta: float = DEFAULT_BETA,
        max_size: Optional[int] = None,
        tol: float = DEFAULT_HULL_TOL,
        on_rebuild: Optional[Callable[[int, np.ndarray], None]] = None,
    ):
        super().__init__(model, config)
        if max_size is None:
            max_size = model.d_nat + 2
        self.store = CandidateStore(model.d_nat, max_size, alpha=alpha, beta=beta, tol=tol)
        self.on_rebuild = on_rebuild

    def _insert(self, tau, cum):
        self.store.append(tau, cum)

    def candidate_arrays(self):
        return self.store.taus, self.store.cums

    def _after_evaluate(self):
        if self.store.needs_rebuild:
            before = len(self.store)
            self.store.rebuild()
            self.logger.debug(
                f"n={self.n}: hull rebuild kept {len(self.store)} of {before} candidates, "
                f"max_size={self.store.max_size}"
            )
            if self.on_rebuild is not None:
                self.on_rebuild(self.n, self.store.taus.copy())
