"""
Simulated streams with an optional change.

Random numbers come from Philox counter-based generators. Replicate r of a run seeded with
`seed` uses the child SeedSequence(seed, spawn_key=(r,)), which is what
SeedSequence(seed).spawn(...)[r] returns, so replicates are reproducible independently of the
order or process in which they run.

Example scenario config:

{
  "id": "dense-p3",
  "model": {"family": "gaussian_mean", "p": 3},
  "n": 1000,
  "changepoint": 200,
  "magnitude": 4.0,
  "sparsity": 3,
  "seed": 7
}
"""

# Standard Library
import json
import math
from typing import Any, Dict, Optional

# Third Party
import numpy as np

# First Party
from mdfocus.core.config_constants import CONFIG_MODEL_KEY, CONFIG_SEED_KEY
from mdfocus.core.model import ModelSpec
from mdfocus.core.modes import Family
from mdfocus.exceptions import ConfigError

ALLOWED_PARAMS = [
    "id",
    CONFIG_MODEL_KEY,
    "n",
    "changepoint",
    "pre",
    "magnitude",
    "sparsity",
    CONFIG_SEED_KEY,
]
SUPPORTED_FAMILIES = [Family.GAUSSIAN_MEAN, Family.POISSON]


def make_rng(seed: Optional[int], replicate: int = 0) -> np.random.Generator:
    """Generator of one replicate of a seeded run."""
    seq = np.random.SeedSequence(seed, spawn_key=(replicate,))
    return np.random.Generator(np.random.Philox(seq))


class StreamScenario:
    """A stream of n observations with a change of squared size `magnitude` after `changepoint`.

    The change shifts the natural parameter of the first `sparsity` coordinates by
    sqrt(magnitude / sparsity) each (the mean for Gaussian coordinates, the log-rate for Poisson
    ones). `pre` is the pre-change natural parameter, zero by default.
    """

    def __init__(
        self,
        model: ModelSpec,
        n: int,
        changepoint: Optional[int] = None,
        pre=None,
        magnitude: float = 0.0,
        sparsity: Optional[int] = None,
        seed: Optional[int] = None,
        scenario_id: str = "scenario",
    ):
        self.model = model
        self.n = int(n)
        self.changepoint = changepoint
        self.pre = np.zeros(model.d_nat) if pre is None else np.asarray(pre, dtype=float)
        self.magnitude = float(magnitude)
        self.sparsity = model.p if sparsity is None else int(sparsity)
        self.seed = seed
        self.scenario_id = scenario_id
        self._check()

    def _check(self):
        if any(f.family not in SUPPORTED_FAMILIES for f in self.model.coords):
            raise ConfigError("streams can only be simulated for gaussian_mean and poisson models")
        if self.n < 1:
            raise ConfigError(f"n={self.n} must be positive")
        if self.changepoint is not None and not 0 <= self.changepoint < self.n:
            raise ConfigError(f"changepoint={self.changepoint} must lie in [0, n={self.n})")
        if not 1 <= self.sparsity <= self.model.p:
            raise ConfigError(f"sparsity={self.sparsity} must lie in [1, p={self.model.p}]")
        if self.magnitude < 0:
            raise ConfigError(f"magnitude={self.magnitude} must be >= 0")
        if self.pre.shape != (self.model.d_nat,):
            raise ConfigError(f"pre={self.pre.tolist()} must have dimension {self.model.d_nat}")

    @property
    def has_change(self) -> bool:
        return self.changepoint is not None and self.magnitude > 0

    @property
    def shift(self) -> np.ndarray:
        """Change of the natural parameter, of squared norm `magnitude`."""
        delta = np.zeros(self.model.d_nat)
        if self.has_change:
            delta[: self.sparsity] = math.sqrt(self.magnitude / self.sparsity)
        return delta

    def with_seed(self, seed) -> "StreamScenario":
        return StreamScenario(
            self.model,
            self.n,
            self.changepoint,
            self.pre,
            self.magnitude,
            self.sparsity,
            seed,
            self.scenario_id,
        )

    @classmethod
    def from_dict(cls, params: Dict[str, Any]) -> "StreamScenario":
        if not isinstance(params, dict):
            raise ConfigError(f"params={params} must be dict")
        if any([x not in ALLOWED_PARAMS for x in params]):
            raise ConfigError(
                "allowed params for a scenario can only be one of " + ",".join(ALLOWED_PARAMS)
            )
        if CONFIG_MODEL_KEY not in params or "n" not in params:
            raise ConfigError("a scenario needs a model and n")
        return cls(
            ModelSpec.from_dict(params[CONFIG_MODEL_KEY]),
            params["n"],
            changepoint=params.get("changepoint"),
            pre=params.get("pre"),
            magnitude=params.get("magnitude", 0.0),
            sparsity=params.get("sparsity"),
            seed=params.get(CONFIG_SEED_KEY),
            scenario_id=params.get("id", "scenario"),
        )

    @classmethod
    def from_json(cls, json_str: str) -> "StreamScenario":
        return cls.from_dict(json.loads(json_str))

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "id": self.scenario_id,
            CONFIG_MODEL_KEY: self.model.to_json_dict(),
            "n": self.n,
            "changepoint": self.changepoint,
            "pre": self.pre.tolist(),
            "magnitude": self.magnitude,
            "sparsity": self.sparsity,
            CONFIG_SEED_KEY: self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    def __eq__(self, other):
        if not isinstance(other, StreamScenario):
            return NotImplemented
        return self.to_json_dict() == other.to_json_dict()

    def __repr__(self):
        return (
            f"<class StreamScenario: id={self.scenario_id}, p={self.model.p}, n={self.n}, "
            f"changepoint={self.changepoint}, magnitude={self.magnitude}, sparsity={self.sparsity}>"
        )


def natural_parameters(scenario: StreamScenario) -> np.ndarray:
    """Natural parameter of every time step, shape (n, d_nat)."""
    eta = np.tile(scenario.pre, (scenario.n, 1))
    if scenario.has_change:
        eta[scenario.changepoint :] += scenario.shift
    return eta


def generate(scenario: StreamScenario, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Natural-statistic stream of shape (n, d_nat).

    Gaussian coordinates are drawn with Generator.standard_normal around their mean, Poisson
    coordinates with Generator.poisson at rate exp(eta).
    """
    if rng is None:
        rng = make_rng(scenario.seed)
    eta = natural_parameters(scenario)
    out = np.empty_like(eta)
    for family, idx, cols in scenario.model.groups:
        cols = cols[:, 0]
        if family.family == Family.GAUSSIAN_MEAN:
            out[:, cols] = eta[:, cols] + rng.standard_normal((scenario.n, cols.shape[0]))
        else:
            out[:, cols] = rng.poisson(np.exp(eta[:, cols]))
    return out
