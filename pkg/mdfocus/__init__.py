# First Party
from mdfocus.calibration.thresholds import ThresholdPlan
from mdfocus.core.model import ModelSpec
from mdfocus.core.modes import EngineKind, Family, StatKind
from mdfocus.core.run_config import RunConfig
from mdfocus.detectors.decision import Decision, run_detection
from mdfocus.detectors.dyadic import DyadicEngine
from mdfocus.detectors.engine import MdFocusEngine
from mdfocus.detectors.projapprox import ApproxEngine, ProjectionPlan
from mdfocus.detectors.statistics import Prechange, StatConfig, Statistic

# Local
from ._version import __version__
