# Local
from .candidates import Candidate, CandidateStore
from .dyadic import DyadicEngine, DyadicState, chunk_bounds, dyadic_update
from .edetector import EDetectorSpec, cusum_argmax, edetector_points, edetector_trace
from .engine import Engine, MdFocusEngine
from .projapprox import ApproxEngine, ProjectionPlan, default_plan
from .statistics import Prechange, StatConfig, Statistic, StatisticReport, evaluate
