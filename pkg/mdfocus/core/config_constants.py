CONFIG_FILE_PATH_ENV_STR = "MDFOCUS_CONFIG_FILE_PATH"
THRESHOLD_PLAN_PATH_ENV_STR = "MDFOCUS_THRESHOLD_PLAN_PATH"

DEFAULT_ALPHA = 2.0
DEFAULT_BETA = 1.0
DEFAULT_HULL_TOL = 1e-9
DEFAULT_VAR_FLOOR = 1.0
DEFAULT_PTILDE = 2
DEFAULT_QMIN_OFFSET = 5
DEFAULT_TRAINING_SIZE = 250
LOG_CLAMP = 1e-12

# Input reading
CSV_DELIMITER = ","
STDIN_PATH = "-"

# Run config keys
CONFIG_MODEL_KEY = "model"
CONFIG_ENGINE_KEY = "engine"
CONFIG_ENGINE_PARAMS_KEY = "engine_params"
CONFIG_STATISTICS_KEY = "statistics"
CONFIG_PRECHANGE_KEY = "prechange"
CONFIG_THRESHOLD_PLAN_KEY = "threshold_plan"
CONFIG_INPUT_KEY = "input"
CONFIG_OUTPUT_KEY = "output"
CONFIG_FORMAT_KEY = "format"
CONFIG_SEED_KEY = "seed"

# Model block keys
MODEL_FAMILY_KEY = "family"
MODEL_DIM_KEY = "p"
MODEL_COORDS_KEY = "coords"
MODEL_TRIALS_KEY = "trials"
MODEL_YMIN_KEY = "y_min"
MODEL_VAR_FLOOR_KEY = "var_floor"

# Prechange block keys
PRECHANGE_KNOWN_KEY = "known"
PRECHANGE_UNKNOWN_KEY = "unknown"
PRECHANGE_ESTIMATE_KEY = "estimate"

# Threshold plan keys
PLAN_THRESHOLDS_KEY = "thresholds"
PLAN_PROVENANCE_KEY = "provenance"

# Experiment defaults
RUNTIME_WARMUP_STEPS = 1000
MULTIPROCESSING_POOL_SIZE_ENV_STR = "MDFOCUS_WORKERS"
