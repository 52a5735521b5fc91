# Local
from .experiments import ExperimentRecord, ExperimentResult, run_experiment
from .montecarlo import calibrate_null_threshold, monte_carlo_plan
from .oracle import brute_force_glr, brute_force_hull
from .plusminus import simulate
from .scenarios import StreamScenario, generate, make_rng
