# Standard Library
from typing import Any, Callable, Dict, Iterable, Optional

# First Party
from mdfocus.calibration.thresholds import ThresholdPlan
from mdfocus.core.logger import get_logger
from mdfocus.detectors.engine import Engine
from mdfocus.detectors.statistics import StatisticReport
from mdfocus.exceptions import DetectionConditionMet

logger = get_logger()


class Decision:
    """Either continue (stopped=False) or stop on a statistic with its changepoint estimate."""

    __slots__ = ("stopped", "n", "stat", "tau_hat", "value", "threshold")

    def __init__(self, stopped, n, stat=None, tau_hat=None, value=None, threshold=None):
        self.stopped = stopped
        self.n = n
        self.stat = stat
        self.tau_hat = tau_hat
        self.value = value
        self.threshold = threshold

    @classmethod
    def proceed(cls, n):
        return cls(False, n)

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "stopped": self.stopped,
            "n": self.n,
            "stat": self.stat,
            "tau_hat": self.tau_hat,
            "value": self.value,
        }

    def __eq__(self, other):
        if not isinstance(other, Decision):
            return NotImplemented
        return self.to_json_dict() == other.to_json_dict()

    def __repr__(self):
        return f"<class Decision: {self.to_json_dict()}>"


def decide(report: StatisticReport, plan: ThresholdPlan) -> Decision:
    """Stops on the first statistic, in configuration order, whose value reaches its threshold."""
    plan.covers(list(report.values))
    for name, stat in report.values.items():
        threshold = plan.value(name, report.n)
        if stat.value >= threshold:
            return Decision(True, report.n, name, stat.tau, stat.value, threshold)
    return Decision.proceed(report.n)


def run_detection(
    engine: Engine,
    rows: Iterable,
    plan: ThresholdPlan,
    raise_on_stop: bool = False,
    on_report: Optional[Callable[[StatisticReport], None]] = None,
    natural: bool = False,
) -> Decision:
    """Feeds raw rows (natural vectors with natural=True) until a threshold is crossed.

    Returns the stop decision, or a continue decision at the last n when rows run out.
    """
    plan.covers(engine.config.names)
    logger.info(f"Started detection with {engine.engine_name} at n={engine.n}")
    for row in rows:
        report = engine.step(row) if natural else engine.observe(row)
        if report is None:
            continue
        if on_report is not None:
            on_report(report)
        decision = decide(report, plan)
        if decision.stopped:
            logger.info(
                f"{engine.engine_name} stopped at n={decision.n} on {decision.stat} "
                f"(value {decision.value:.6g} >= {decision.threshold:.6g}, "
                f"tau_hat={decision.tau_hat})"
            )
            if raise_on_stop:
                raise DetectionConditionMet(
                    decision.stat, decision.n, decision.tau_hat, decision.value
                )
            return decision
    logger.info(f"Ended detection with {engine.engine_name} at n={engine.n} without a stop")
    return Decision.proceed(engine.n)
