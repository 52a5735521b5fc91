# Standard Library
import os
from typing import List

# Third Party
import numpy as np

# First Party
from mdfocus.exceptions import InputError


def split(comma_separated_string: str) -> List[str]:
    """Split "foo, bar,b az" into ["foo","bar","b az"]."""
    return [x.strip() for x in comma_separated_string.split(",")]


def parse_list_from_str(arg, delimiter=","):
    """Accepts a delimited string or a list and returns a list of non-empty strings."""
    if arg is None:
        return []
    if isinstance(arg, str):
        return [x for x in split(arg.replace(delimiter, ",")) if x != ""]
    return list(arg)


def ensure_dir(file_path, is_file=True):
    directory = os.path.dirname(file_path) if is_file else file_path
    if directory and not os.path.exists(directory):
        os.makedirs(directory, exist_ok=True)


def as_finite_vector(x, dim=None, what="observation") -> np.ndarray:
    """Coerces x to a 1-d float array, checking its length and finiteness."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise InputError("{} must be a vector, got shape {}".format(what, arr.shape))
    if dim is not None and arr.shape[0] != dim:
        raise InputError("{} has dimension {}, expected {}".format(what, arr.shape[0], dim))
    if not np.all(np.isfinite(arr)):
        raise InputError("{} {} contains non-finite values".format(what, arr.tolist()))
    return arr
