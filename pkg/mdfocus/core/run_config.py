# Standard Library
import json
from typing import Any, Dict, Optional

# First Party
from mdfocus.calibration.thresholds import ThresholdPlan
from mdfocus.core.access_layer.file import ALLOWED_TRACE_FORMATS
from mdfocus.core.config_constants import (
    CONFIG_ENGINE_KEY,
    CONFIG_ENGINE_PARAMS_KEY,
    CONFIG_FORMAT_KEY,
    CONFIG_INPUT_KEY,
    CONFIG_MODEL_KEY,
    CONFIG_OUTPUT_KEY,
    CONFIG_PRECHANGE_KEY,
    CONFIG_SEED_KEY,
    CONFIG_STATISTICS_KEY,
    CONFIG_THRESHOLD_PLAN_KEY,
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    DEFAULT_HULL_TOL,
    DEFAULT_PTILDE,
    STDIN_PATH,
)
from mdfocus.core.logger import get_logger
from mdfocus.core.model import ModelSpec
from mdfocus.core.modes import ALLOWED_ENGINES, EngineKind
from mdfocus.detectors.dyadic import DyadicEngine
from mdfocus.detectors.engine import Engine, MdFocusEngine
from mdfocus.detectors.projapprox import ApproxEngine, ProjectionPlan
from mdfocus.detectors.statistics import StatConfig
from mdfocus.exceptions import ConfigError

ALLOWED_PARAMS = [
    CONFIG_MODEL_KEY,
    CONFIG_ENGINE_KEY,
    CONFIG_ENGINE_PARAMS_KEY,
    CONFIG_STATISTICS_KEY,
    CONFIG_PRECHANGE_KEY,
    CONFIG_THRESHOLD_PLAN_KEY,
    CONFIG_INPUT_KEY,
    CONFIG_OUTPUT_KEY,
    CONFIG_FORMAT_KEY,
    CONFIG_SEED_KEY,
]
ALLOWED_ENGINE_PARAMS = [
    "alpha",
    "beta",
    "max_size",
    "q_min",
    "ptilde",
    "subsets",
    "workers",
    "tol",
]
ALLOWED_FORMATS = ALLOWED_TRACE_FORMATS


class RunConfig:
    """Everything a detection run needs, validated before anything is read.

    Attributes
    ----------
    model: ModelSpec
    engine: EngineKind
    engine_params: dict with keys among alpha, beta, max_size, q_min, ptilde, subsets, workers, tol
    stat_config: StatConfig
    threshold_plan: path to a plan document, an inline plan dict, or None
    input, output: paths, "-" for stdin/stdout
    format: jsonl or csv
    seed: recorded for re-execution
    """

    def __init__(
        self,
        model: ModelSpec,
        engine: EngineKind = EngineKind.EXACT,
        engine_params: Optional[Dict[str, Any]] = None,
        stat_config: Optional[StatConfig] = None,
        threshold_plan=None,
        input: str = STDIN_PATH,
        output: str = STDIN_PATH,
        format: str = "jsonl",
        seed: Optional[int] = None,
    ):
        self.model = model
        self.engine = engine
        self.engine_params = dict(engine_params or {})
        self.stat_config = stat_config if stat_config is not None else StatConfig()
        self.threshold_plan = threshold_plan
        self.input = input
        self.output = output
        self.format = format
        self.seed = seed
        self._check()

    def _check(self):
        if not isinstance(self.engine, EngineKind):
            raise ConfigError(f"engine={self.engine} must be an EngineKind")
        unknown = [k for k in self.engine_params if k not in ALLOWED_ENGINE_PARAMS]
        if unknown:
            raise ConfigError(
                "allowed engine params can only be one of " + ",".join(ALLOWED_ENGINE_PARAMS)
            )
        if self.format not in ALLOWED_FORMATS:
            raise ConfigError(f"format={self.format} must be one of " + ",".join(ALLOWED_FORMATS))
        self.stat_config.validate(self.model)

    @classmethod
    def from_dict(cls, params: Dict[str, Any]) -> "RunConfig":
        if not isinstance(params, dict):
            raise ConfigError(f"params={params} must be dict")
        if any([x not in ALLOWED_PARAMS for x in params]):
            raise ConfigError(
                "allowed params for a run config can only be one of " + ",".join(ALLOWED_PARAMS)
            )
        if CONFIG_MODEL_KEY not in params:
            raise ConfigError("run config needs a model block")
        engine = params.get(CONFIG_ENGINE_KEY, EngineKind.EXACT.value)
        if engine not in ALLOWED_ENGINES:
            raise ConfigError(f"engine={engine} must be one of " + ",".join(ALLOWED_ENGINES))
        stat_params = {
            k: params[k] for k in (CONFIG_STATISTICS_KEY, CONFIG_PRECHANGE_KEY) if k in params
        }
        return cls(
            model=ModelSpec.from_dict(params[CONFIG_MODEL_KEY]),
            engine=EngineKind(engine),
            engine_params=params.get(CONFIG_ENGINE_PARAMS_KEY),
            stat_config=StatConfig.from_dict(stat_params),
            threshold_plan=params.get(CONFIG_THRESHOLD_PLAN_KEY),
            input=params.get(CONFIG_INPUT_KEY, STDIN_PATH),
            output=params.get(CONFIG_OUTPUT_KEY, STDIN_PATH),
            format=params.get(CONFIG_FORMAT_KEY, "jsonl"),
            seed=params.get(CONFIG_SEED_KEY),
        )

    @classmethod
    def from_json(cls, json_str: str) -> "RunConfig":
        return cls.from_dict(json.loads(json_str))

    def to_json_dict(self) -> Dict[str, Any]:
        stat = self.stat_config.to_json_dict()
        plan = self.threshold_plan
        if isinstance(plan, ThresholdPlan):
            plan = plan.to_json_dict()
        return {
            CONFIG_MODEL_KEY: self.model.to_json_dict(),
            CONFIG_ENGINE_KEY: self.engine.value,
            CONFIG_ENGINE_PARAMS_KEY: dict(self.engine_params),
            CONFIG_STATISTICS_KEY: stat[CONFIG_STATISTICS_KEY],
            CONFIG_PRECHANGE_KEY: stat[CONFIG_PRECHANGE_KEY],
            CONFIG_THRESHOLD_PLAN_KEY: plan,
            CONFIG_INPUT_KEY: self.input,
            CONFIG_OUTPUT_KEY: self.output,
            CONFIG_FORMAT_KEY: self.format,
            CONFIG_SEED_KEY: self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    def override(self, **kwargs) -> "RunConfig":
        """A copy with top-level fields (engine, input, ...) or engine params replaced.

        None values are ignored, so parsed command-line flags can be passed directly.
        """
        params = self.to_json_dict()
        for key, value in kwargs.items():
            if value is None:
                continue
            if key in ALLOWED_ENGINE_PARAMS:
                params[CONFIG_ENGINE_PARAMS_KEY][key] = value
            elif key in ALLOWED_PARAMS:
                params[key] = value
            else:
                raise ConfigError(f"{key} cannot be overridden")
        return RunConfig.from_dict(params)

    def load_threshold_plan(self) -> ThresholdPlan:
        plan = self.threshold_plan
        if plan is None:
            raise ConfigError("detection needs a threshold plan")
        if isinstance(plan, ThresholdPlan):
            return plan
        if isinstance(plan, dict):
            return ThresholdPlan.from_dict(plan)
        try:
            with open(plan) as f:
                loaded = ThresholdPlan.from_json(f.read())
        except FileNotFoundError:
            raise ConfigError(f"threshold plan {plan} does not exist")
        except json.JSONDecodeError as e:
            raise ConfigError(f"threshold plan {plan} is not valid JSON: {e}")
        get_logger().info(f"Loaded threshold plan from {plan}.")
        return loaded

    def build_engine(self) -> Engine:
        return build_engine(self.model, self.stat_config, self.engine, self.engine_params)

    def __eq__(self, other):
        if not isinstance(other, RunConfig):
            return NotImplemented
        return self.to_json_dict() == other.to_json_dict()

    def __repr__(self):
        return (
            f"<class RunConfig: model={self.model}, engine={self.engine.value}, "
            f"statistics={self.stat_config.names}, input={self.input}>"
        )


def build_engine(
    model: ModelSpec,
    stat_config: StatConfig,
    engine: EngineKind = EngineKind.EXACT,
    engine_params: Optional[Dict[str, Any]] = None,
) -> Engine:
    params = engine_params or {}
    alpha = params.get("alpha", DEFAULT_ALPHA)
    beta = params.get("beta", DEFAULT_BETA)
    tol = params.get("tol", DEFAULT_HULL_TOL)
    if engine == EngineKind.EXACT:
        built = MdFocusEngine(
            model, stat_config, alpha=alpha, beta=beta, max_size=params.get("max_size"), tol=tol
        )
    elif engine == EngineKind.DYADIC:
        built = DyadicEngine(model, stat_config, q_min=params.get("q_min"), tol=tol)
    else:
        subsets = params.get("subsets")
        ptilde = params.get("ptilde", min(DEFAULT_PTILDE, model.p))
        if subsets is not None:
            plan = ProjectionPlan(subsets, model.p)
        else:
            plan = ProjectionPlan.blocks(model.p, ptilde)
        built = ApproxEngine(
            model,
            stat_config,
            plan=plan,
            alpha=alpha,
            beta=beta,
            tol=tol,
            workers=params.get("workers", 1),
        )
    get_logger().info(
        f"Built {built.engine_name} for p={model.p} with statistics {stat_config.names}"
    )
    return built
