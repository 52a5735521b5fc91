# Local
from .bounds import DelayBound, add_bound, dd_bound, effective_sparsity, thresholded_dd_bound
from .expectation import HarmonicTable, expected_counts, stirling_ratio
from .thresholds import (
    FixedThreshold,
    ThresholdPlan,
    TimeVaryingThreshold,
    analytic_arl_plan,
    arl_threshold,
    false_alarm_plan,
    false_alarm_threshold,
)
