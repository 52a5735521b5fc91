"""
Example JSON config:

{
  "model": {"family": "gaussian_mean", "p": 2},
  "engine": "exact",
  "engine_params": {"alpha": 2.0, "beta": 1.0},
  "statistics": ["dense", "ranked:1", "thresholded:2.5", "sum_of_max"],
  "prechange": {"known": [0.0, 0.0]},
  "threshold_plan": "plan.json",
  "input": "data.csv",
  "output": "-",
  "format": "jsonl",
  "seed": 0
}
"""

# Standard Library
import json
import os
from typing import Dict, Optional

# First Party
from mdfocus.core.config_constants import CONFIG_FILE_PATH_ENV_STR
from mdfocus.core.logger import get_logger
from mdfocus.exceptions import ConfigError


def get_json_config_as_dict(json_config_path: Optional[str] = None) -> Dict:
    """Checks json_config_path, then the environment variable, then attempts to load.

    Raises ConfigError if no config is available or it is not valid JSON.
    """
    path = json_config_path if json_config_path is not None else os.getenv(CONFIG_FILE_PATH_ENV_STR)
    if path is None:
        raise ConfigError(f"no config file given and {CONFIG_FILE_PATH_ENV_STR} is not set")
    try:
        with open(path) as json_config_file:
            params_dict = json.load(json_config_file)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} does not exist")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}")
    if not isinstance(params_dict, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    get_logger().info(f"Loaded run config from {path}.")
    return params_dict
