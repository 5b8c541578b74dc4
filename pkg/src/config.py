"""ScenarioConfig Class."""
import dataclasses
import json
from os import path
from typing import Any, Dict, List, Optional, Tuple

from src.exceptions import ScenarioConfigException
from src.helpers import parse_float_list
from src.logger import init_logger

logger = init_logger()

SCENARIOS: Tuple[str, ...] = ("binary", "health", "voting", "finite", "investor")

# (kind, default) per parameter; kinds are coerced by _coerce
PARAMETER_SCHEMA: Dict[str, Dict[str, Tuple[str, Any]]] = {
    "binary": {
        "payoffs": ("floats", [3.0, -1.0, 1.0, 4.0]),
        "rho": ("float", 1.0),
        "mu0": ("float", 0.2),
        "grid_points": ("int", 101),
    },
    "health": {
        "sigma": ("float", 2.0),
        "cost": ("float", 0.5),
        "alpha": ("float", 0.8),
        "theta_low": ("float", 0.1),
        "theta_high": ("float", 0.9),
        "rho": ("float", 2.0),
        "mu0": ("float", 0.3),
        "grid_points": ("int", 101),
    },
    "voting": {
        "betas": ("floats", [0.25, 0.5, 0.75]),
        "rho": ("float", 2.0),
        "mu": ("float", 0.5),
        "mu0": ("float", 0.3),
        "grid_points": ("int", 101),
    },
    "finite": {
        "utilities": ("matrix", [[2.0, 3.0, -1.0], [1.0, 0.0, 4.0]]),
        "rho": ("float", 1.0),
        "mu0": ("floats", [0.45, 0.45, 0.1]),
        "oracle_resolution": ("int", 40),
    },
    "investor": {
        "prior": ("prior", {"family": "uniform", "low": -2.0, "high": 1.0}),
        "rho": ("float", 1.0),
        "atoms": ("int", 50),
        "grid_points": ("int", 101),
    },
}

SWEEP_PARAMETERS: Dict[str, Tuple[str, ...]] = {
    "binary": ("rho", "mu0"),
    "health": ("sigma", "cost", "alpha", "rho", "mu0"),
    "voting": ("mu", "rho"),
    "finite": ("rho",),
    "investor": ("rho",),
}

# sweeps that may omit from/to and take their range from the model
AUTO_RANGE: Tuple[Tuple[str, str], ...] = (("health", "sigma"),)

PRIOR_FAMILY_KEYS: Dict[str, Tuple[str, ...]] = {
    "uniform": ("low", "high"),
    "truncated_normal": ("mean", "std", "low", "high"),
    "piecewise_linear": ("knots",),
}

TOP_LEVEL_KEYS = ("scenario", "parameters", "sweep")
SWEEP_KEYS = ("parameter", "from", "to", "steps", "series")
SERIES_KEYS = ("parameter", "values")


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _coerce(kind: str, key: str, value: Any) -> Any:
    """
    Coerce a parameter value to its declared kind.

    :param kind: One of float, int, floats, matrix, prior.
    :type kind: str
    :param key: Parameter name, for error messages.
    :type key: str
    :param value: Raw value from JSON or flags.
    :type value: Any
    :raises ScenarioConfigException: If the value does not fit the kind.
    :return: The coerced value.
    :rtype: Any
    """
    if kind == "float" and _is_number(value):
        return float(value)
    if kind == "int" and _is_number(value) and float(value).is_integer():
        return int(value)
    if kind == "floats" and isinstance(value, list) and all(_is_number(x) for x in value):
        return [float(x) for x in value]
    if (
        kind == "matrix"
        and isinstance(value, list)
        and value
        and all(isinstance(row, list) and all(_is_number(x) for x in row) for row in value)
        and len({len(row) for row in value}) == 1
    ):
        return [[float(x) for x in row] for row in value]
    if kind == "prior" and isinstance(value, dict):
        return _coerce_prior(value)
    raise ScenarioConfigException(f"Parameter '{key}' expects {kind}, got {value!r}")


def _coerce_prior(document: Dict[str, Any]) -> Dict[str, Any]:
    family = document.get("family")
    if family not in PRIOR_FAMILY_KEYS:
        raise ScenarioConfigException(
            f"Prior family must be one of {sorted(PRIOR_FAMILY_KEYS)}, got {family!r}"
        )
    allowed = PRIOR_FAMILY_KEYS[family]
    unknown = sorted(set(document) - set(allowed) - {"family"})
    missing = sorted(set(allowed) - set(document))
    if unknown or missing:
        raise ScenarioConfigException(
            f"Prior '{family}' has unknown keys {unknown} or missing keys {missing}"
        )
    coerced: Dict[str, Any] = {"family": family}
    for key in allowed:
        if key == "knots":
            coerced[key] = _coerce_knots(document[key])
        else:
            coerced[key] = _coerce("float", f"prior.{key}", document[key])
    return coerced


def _coerce_knots(value: Any) -> List[List[float]]:
    """[theta, density] pairs: at least two, theta strictly increasing, density > 0."""
    knots = _coerce("matrix", "prior.knots", value)
    if len(knots) < 2 or len(knots[0]) != 2:
        raise ScenarioConfigException(
            f"Parameter 'prior.knots' expects at least 2 [theta, density] pairs, got {value!r}"
        )
    thetas = [theta for theta, _ in knots]
    if any(right <= left for left, right in zip(thetas, thetas[1:])):
        raise ScenarioConfigException(
            f"Parameter 'prior.knots' needs strictly increasing theta, got {thetas}"
        )
    if any(density <= 0.0 for _, density in knots):
        raise ScenarioConfigException(
            f"Parameter 'prior.knots' needs densities > 0, got {[d for _, d in knots]}"
        )
    return knots


def _reject_unknown(where: str, document: Dict[str, Any], allowed: Tuple[str, ...]) -> None:
    unknown = sorted(set(document) - set(allowed))
    if unknown:
        raise ScenarioConfigException(f"Unknown keys in {where}: {unknown}")


@dataclasses.dataclass
class SweepSpec:
    """
    Grid over one parameter, optionally repeated for each value of a second one.

    start and stop may be None only for sweeps whose range the model provides.
    """

    parameter: str
    steps: int
    start: Optional[float] = None
    stop: Optional[float] = None
    series_parameter: Optional[str] = None
    series_values: Optional[List[Any]] = None

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> "SweepSpec":
        """
        Read a sweep from its JSON form.

        :param document: {"parameter", "from"?, "to"?, "steps", "series"?}.
        :type document: Dict[str, Any]
        :return: The sweep.
        :rtype: SweepSpec
        """
        if not isinstance(document, dict):
            raise ScenarioConfigException(f"Sweep must be an object, got {document!r}")
        _reject_unknown("sweep", document, SWEEP_KEYS)
        if "parameter" not in document or "steps" not in document:
            raise ScenarioConfigException("Sweep needs 'parameter' and 'steps'")

        series = document.get("series")
        if series is not None:
            if not isinstance(series, dict):
                raise ScenarioConfigException(f"Sweep series must be an object, got {series!r}")
            _reject_unknown("sweep.series", series, SERIES_KEYS)
            if not isinstance(series.get("values"), list) or not series["values"]:
                raise ScenarioConfigException("Sweep series needs a non-empty 'values' list")

        return cls(
            parameter=document["parameter"],
            steps=_coerce("int", "sweep.steps", document["steps"]),
            start=None if document.get("from") is None else _coerce("float", "sweep.from", document["from"]),
            stop=None if document.get("to") is None else _coerce("float", "sweep.to", document["to"]),
            series_parameter=None if series is None else series.get("parameter"),
            series_values=None if series is None else list(series["values"]),
        )

    @classmethod
    def from_flag(cls, text: str) -> "SweepSpec":
        """
        Read a sweep from the PARAM:FROM:TO:STEPS flag form.

        FROM and TO may be left empty for sweeps with a model-provided range.

        :param text: e.g. "rho:0.01:5:100" or "sigma:::100".
        :type text: str
        :return: The sweep.
        :rtype: SweepSpec
        """
        parts = text.split(":")
        if len(parts) != 4:
            raise ScenarioConfigException(f"Sweep flag must be PARAM:FROM:TO:STEPS, got {text!r}")
        parameter, start, stop, steps = parts
        try:
            return cls(
                parameter=parameter,
                steps=int(steps),
                start=float(start) if start else None,
                stop=float(stop) if stop else None,
            )
        except ValueError as error:
            raise ScenarioConfigException(f"Invalid sweep flag {text!r}: {error}") from error

    def to_dict(self) -> Dict[str, Any]:
        """JSON form, omitting unset entries."""
        document: Dict[str, Any] = {"parameter": self.parameter, "steps": self.steps}
        if self.start is not None:
            document["from"] = self.start
        if self.stop is not None:
            document["to"] = self.stop
        if self.series_parameter is not None:
            document["series"] = {
                "parameter": self.series_parameter,
                "values": self.series_values,
            }
        return document


class ScenarioConfig:
    """
    A class for reading scenario settings from a JSON document, a preset or flags.

    Parameters not given take the scenario defaults; unknown keys are rejected.
    """

    def __init__(
        self,
        scenario: str,
        parameters: Dict[str, Any] = None,
        sweep: SweepSpec = None,
    ):
        """
        Initialize the ScenarioConfig instance.

        :param scenario: One of binary, health, voting, finite, investor.
        :type scenario: str
        :param parameters: Parameter overrides (default is None - all defaults).
        :type parameters: Dict[str, Any]
        :param sweep: Optional sweep specification.
        :type sweep: SweepSpec
        """
        if scenario not in SCENARIOS:
            raise ScenarioConfigException(
                f"Unknown scenario {scenario!r}; choose one of {', '.join(SCENARIOS)}"
            )
        self.scenario = scenario
        self.parameters = dict(parameters or {})
        self.sweep = sweep

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> "ScenarioConfig":
        """
        Build a config from its JSON form.

        :param document: {"scenario", "parameters"?, "sweep"?}.
        :type document: Dict[str, Any]
        :return: The config.
        :rtype: ScenarioConfig
        """
        if not isinstance(document, dict):
            raise ScenarioConfigException("Config document must be a JSON object")
        _reject_unknown("config", document, TOP_LEVEL_KEYS)
        if "scenario" not in document:
            raise ScenarioConfigException("Config document needs a 'scenario'")
        parameters = document.get("parameters") or {}
        if not isinstance(parameters, dict):
            raise ScenarioConfigException("'parameters' must be a JSON object")
        sweep = document.get("sweep")
        return cls(
            scenario=document["scenario"],
            parameters=parameters,
            sweep=None if sweep is None else SweepSpec.from_dict(sweep),
        )

    @classmethod
    def from_file(cls, conf_path: str) -> "ScenarioConfig":
        """
        Read a config from a JSON file.

        :param conf_path: Path of the JSON document.
        :type conf_path: str
        :raises ScenarioConfigException: If the file is missing or not valid JSON.
        :return: The config.
        :rtype: ScenarioConfig
        """
        if not path.exists(conf_path):
            logger.error("Config file not found at path: %s", conf_path)
            raise ScenarioConfigException(f"Config file not found: {conf_path}")
        try:
            with open(conf_path, "r", encoding="utf-8") as file:
                document = json.load(file)
        except json.JSONDecodeError as error:
            logger.error("Config file is not valid JSON: %s", conf_path, exc_info=True)
            raise ScenarioConfigException(f"Invalid JSON in {conf_path}: {error}") from error
        return cls.from_dict(document)

    def merge(self, other: "ScenarioConfig") -> "ScenarioConfig":
        """
        Layer another config of the same scenario on top of this one.

        :param other: Config whose parameters and sweep take precedence.
        :type other: ScenarioConfig
        :return: The merged config.
        :rtype: ScenarioConfig
        """
        if other.scenario != self.scenario:
            raise ScenarioConfigException(
                f"Cannot combine scenario {self.scenario!r} with {other.scenario!r}"
            )
        return ScenarioConfig(
            scenario=self.scenario,
            parameters={**self.parameters, **other.parameters},
            sweep=other.sweep if other.sweep is not None else self.sweep,
        )

    def override(self, key: str, value: Any) -> None:
        """Set one parameter; it is validated with the rest."""
        self.parameters[key] = value

    def override_from_text(self, assignment: str) -> None:
        """
        Set one parameter from a KEY=JSON assignment.

        :param assignment: e.g. 'betas=[0.2,0.5,0.8]'.
        :type assignment: str
        """
        key, separator, raw = assignment.partition("=")
        if not separator or not key:
            raise ScenarioConfigException(f"Expected KEY=VALUE, got {assignment!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            if "," not in raw:
                raise ScenarioConfigException(f"Value of '{key}' is not JSON: {raw!r}")
            try:
                value = parse_float_list(raw)
            except ValueError as error:
                raise ScenarioConfigException(f"Value of '{key}' is not a list: {raw!r}") from error
        self.override(key.strip(), value)

    def resolved_parameters(self) -> Dict[str, Any]:
        """
        Defaults merged with the given parameters, coerced to their kinds.

        :raises ScenarioConfigException: On unknown keys or ill-typed values.
        :return: The full parameter map.
        :rtype: Dict[str, Any]
        """
        schema = PARAMETER_SCHEMA[self.scenario]
        _reject_unknown(f"{self.scenario} parameters", self.parameters, tuple(schema))
        resolved = {}
        for key, (kind, default) in schema.items():
            resolved[key] = _coerce(kind, key, self.parameters.get(key, default))
        return resolved

    def validate(self) -> None:
        """
        Check parameter keys, kinds and the sweep specification.

        Model preconditions are checked when the scenario builds its models.
        """
        schema = PARAMETER_SCHEMA[self.scenario]
        self.resolved_parameters()
        if self.sweep is None:
            return

        sweep = self.sweep
        if sweep.parameter not in SWEEP_PARAMETERS[self.scenario]:
            raise ScenarioConfigException(
                f"Cannot sweep '{sweep.parameter}' in {self.scenario}; "
                f"choose one of {', '.join(SWEEP_PARAMETERS[self.scenario])}"
            )
        if sweep.steps < 1:
            raise ScenarioConfigException(f"Sweep needs at least 1 step, got {sweep.steps}")
        if (sweep.start is None or sweep.stop is None) and (
            self.scenario,
            sweep.parameter,
        ) not in AUTO_RANGE:
            raise ScenarioConfigException(f"Sweep over '{sweep.parameter}' needs 'from' and 'to'")
        if sweep.series_parameter is not None:
            if sweep.series_parameter not in schema or sweep.series_parameter == sweep.parameter:
                raise ScenarioConfigException(
                    f"Invalid series parameter {sweep.series_parameter!r}"
                )
            kind = schema[sweep.series_parameter][0]
            sweep.series_values = [
                _coerce(kind, sweep.series_parameter, value) for value in sweep.series_values
            ]

    def to_dict(self) -> Dict[str, Any]:
        """Canonical JSON form with every parameter spelled out."""
        document: Dict[str, Any] = {
            "scenario": self.scenario,
            "parameters": self.resolved_parameters(),
        }
        if self.sweep is not None:
            self.validate()
            document["sweep"] = self.sweep.to_dict()
        return document

    def to_json(self) -> str:
        """
        Serialize the config.

        :return: JSON with sorted keys and 2-space indentation.
        :rtype: str
        """
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"
