"""Named scenario configurations reproducing the standard figures."""
import copy
from typing import Any, Dict, List, Tuple

from src.config import ScenarioConfig
from src.exceptions import ScenarioConfigException
from src.logger import init_logger

logger = init_logger()

FIG6_RHO_SWEEP = {"parameter": "rho", "from": 0.01, "to": 5.0, "steps": 100}

PRESETS: Dict[str, Dict[str, Any]] = {
    "health-fig3": {
        "description": "Health thresholds and motivated beliefs on the posterior grid",
        "config": {"scenario": "health", "parameters": {}},
    },
    "health-fig4": {
        "description": "Health thresholds and adoption across the severity range",
        "config": {
            "scenario": "health",
            "parameters": {},
            "sweep": {"parameter": "sigma", "steps": 100},
        },
    },
    "health-fig5": {
        "description": "Adoption across severity for a fully and a partly effective treatment",
        "config": {
            "scenario": "health",
            "parameters": {},
            "sweep": {
                "parameter": "sigma",
                "steps": 100,
                "series": {"parameter": "alpha", "values": [1.0, 0.8]},
            },
        },
    },
    "binary-fig6a": {
        "description": "Wishful threshold against rho when action 1 varies more",
        "config": {
            "scenario": "binary",
            "parameters": {},
            "sweep": {
                **FIG6_RHO_SWEEP,
                "series": {
                    "parameter": "payoffs",
                    "values": [[3.0, -1.0, 1.0, 4.0], [3.0, 0.5, 1.0, 4.0], [3.0, 1.0, -1.0, 4.0]],
                },
            },
        },
    },
    "binary-fig6b": {
        "description": "Wishful threshold against rho with equal payoff variability",
        "config": {
            "scenario": "binary",
            "parameters": {},
            "sweep": {
                **FIG6_RHO_SWEEP,
                "series": {
                    "parameter": "payoffs",
                    "values": [[4.0, -1.0, 1.0, 4.0], [4.0, 1.0, -1.0, 4.0]],
                },
            },
        },
    },
    "binary-fig6c": {
        "description": "Wishful threshold against rho when action 0 varies more",
        "config": {
            "scenario": "binary",
            "parameters": {},
            "sweep": {
                **FIG6_RHO_SWEEP,
                "series": {
                    "parameter": "payoffs",
                    "values": [[4.0, 1.0, -1.0, 3.0], [4.0, -1.0, 1.0, 3.0], [4.0, 1.0, 0.5, 3.0]],
                },
            },
        },
    },
    "voting-fig7": {
        "description": "Voter thresholds, beliefs and polarization for three voters",
        "config": {
            "scenario": "voting",
            "parameters": {"betas": [0.25, 0.5, 0.75], "rho": 2.0, "mu": 0.5},
        },
    },
    "ternary": {
        "description": "Three-state problem where the wishful receiver is easier to persuade",
        "config": {
            "scenario": "finite",
            "parameters": {
                "utilities": [[2.0, 3.0, -1.0], [1.0, 0.0, 4.0]],
                "rho": 1.0,
                "mu0": [0.45, 0.45, 0.1],
            },
        },
    },
    "investor-demo": {
        "description": "Uniform(-2, 1) returns with rho = 1",
        "config": {
            "scenario": "investor",
            "parameters": {"prior": {"family": "uniform", "low": -2.0, "high": 1.0}, "rho": 1.0},
        },
    },
}


def preset_config(name: str) -> ScenarioConfig:
    """
    Build the config of a preset.

    :param name: Preset name, see ``PRESETS``.
    :type name: str
    :raises ScenarioConfigException: If the preset does not exist.
    :return: A fresh config; changing it leaves the preset untouched.
    :rtype: ScenarioConfig
    """
    if name not in PRESETS:
        raise ScenarioConfigException(
            f"Unknown preset {name!r}; choose one of {', '.join(sorted(PRESETS))}"
        )
    logger.info("Using preset %s", name)
    return ScenarioConfig.from_dict(copy.deepcopy(PRESETS[name]["config"]))


def list_presets() -> List[Tuple[str, str, str]]:
    """(name, scenario, description) for every preset, sorted by name."""
    return [
        (name, preset["config"]["scenario"], preset["description"])
        for name, preset in sorted(PRESETS.items())
    ]
