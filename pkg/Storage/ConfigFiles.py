import json
import logging
import os
from pathlib import Path

from Models.ABParams import ABParams
from Models.CurvePoint import CurveParams
from Models.ScenarioConfig import ScenarioConfig
from Curve.Curve import TOY_CURVE, validate_curve
from Curve.Errors import InvalidCurve
from ModMath.ParamsGenerator import check_ab_params
from Storage.FileFormats import curve_from_dict, params_from_dict

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"
SEED_VARIABLE = "CRTAUTH_SEED"
FIXTURE_PARAMS = "fixture-53-83-89"


def load_config_file(relative: str) -> dict | None:
    try:
        with open(CONFIG_DIR / relative, "r") as file:
            return json.loads(file.read())
    except FileNotFoundError:
        logger.warning(f"File \"{relative}\" was not found in config folder. Using built-in defaults...")
        return None


def scenario_config(scenario: str, seed: int, **overrides) -> ScenarioConfig:
    """Scenario settings from config/scenario_defaults.json, then the explicit overrides."""
    values = load_config_file("scenario_defaults.json") or {}
    known = set(ScenarioConfig.model_fields)
    for key in sorted(set(values) - known):
        logger.error(f"Unknown key \"{key}\" in scenario_defaults.json")
    values = {key: value for key, value in values.items() if key in known}
    values.update({key: value for key, value in overrides.items() if value is not None})
    values.update(scenario=scenario, seed=seed)
    return ScenarioConfig(**values)


def load_curve(name: str) -> CurveParams:
    data = load_config_file(f"curves/{name}.json")
    if data is None:
        if name == TOY_CURVE.name:
            return TOY_CURVE
        raise InvalidCurve(f"no curve file for {name!r}")
    return validate_curve(curve_from_dict(data))


def load_params(name: str = FIXTURE_PARAMS) -> ABParams:
    data = load_config_file(f"params/{name}.json")
    if data is None:
        raise FileNotFoundError(f"no parameter file config/params/{name}.json")
    return check_ab_params(params_from_dict(data))


def default_seed() -> int | None:
    value = os.environ.get(SEED_VARIABLE)
    if value is None:
        return None
    try:
        return int(value, 0)
    except ValueError:
        logger.error(f"{SEED_VARIABLE}={value!r} is not an integer, ignoring it")
        return None
