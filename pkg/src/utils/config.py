"""
Configuration management for the reliability benchmark.

Settings come from plain-text ``key = value`` files (experiment configs and
dataset-preparation descriptors share the format). Values are kept as strings
until a typed accessor converts them, with documented fallbacks for every key.

Usage:
    from src.utils.config import get_harness_config, load_settings

    settings = load_settings("configs/standard.cfg")
    harness = get_harness_config(settings)
    seed = harness["seed"]
"""

import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, TypeVar, Union

logger = logging.getLogger(__name__)

T = TypeVar("T")

DEFAULT_ALPHA_GRID = (0.001, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0)
DEFAULT_SIZES = (50, 100, 200)
DEFAULT_BETAS = (0.0, 0.10, 0.20)
DEFAULT_SEED = 20240917

_TRUE_STRINGS = {"1", "true", "yes", "y", "on"}
_FALSE_STRINGS = {"0", "false", "no", "n", "off"}


def parse_settings_text(text: str) -> Dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are ignored.

    Later duplicates override earlier ones.
    """
    settings: Dict[str, str] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"Line {lineno}: expected 'key = value', got {raw_line!r}")
        key, value = line.split("=", 1)
        key = key.strip().lower().replace("-", "_")
        if not key:
            raise ValueError(f"Line {lineno}: empty key")
        if key in settings:
            logger.debug("Setting %s redefined on line %d", key, lineno)
        settings[key] = value.strip()
    return settings


def load_settings(path: Union[str, Path]) -> Dict[str, str]:
    """
    Read a ``key = value`` settings file.

    Args:
        path: Settings file location

    Returns:
        Mapping of normalized keys (lowercase, dashes as underscores) to raw strings

    Raises:
        FileNotFoundError: If the file does not exist
    """
    settings_path = Path(path)
    if not settings_path.exists():
        raise FileNotFoundError(f"Settings file not found: {settings_path}")
    settings = parse_settings_text(settings_path.read_text(encoding="utf-8"))
    logger.debug("Loaded %d settings from %s", len(settings), settings_path)
    return settings


def _to_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in _TRUE_STRINGS:
        return True
    if lowered in _FALSE_STRINGS:
        return False
    raise ValueError(f"Cannot interpret {value!r} as a boolean")


def get_setting(
    settings: Mapping[str, Any], key_path: str, default: Any = None, cast: Optional[Callable[[str], Any]] = None
) -> Any:
    """
    Safely retrieve a single setting.

    Args:
        settings: Parsed settings (values may already be typed, e.g. CLI overrides)
        key_path: Setting key; dashes and case are normalized
        default: Returned when the key is missing or empty
        cast: Optional converter applied to string values (``bool`` is understood)

    Returns:
        The converted value or ``default``

    Examples:
        >>> get_setting({"seed": "7"}, "seed", 0, int)
        7
        >>> get_setting({}, "log_level", "INFO")
        'INFO'
    """
    key = key_path.strip().lower().replace("-", "_")
    value = settings.get(key)
    if value is None or (isinstance(value, str) and not value.strip()):
        return default
    if cast is None or not isinstance(value, str):
        return value
    try:
        if cast is bool:
            return _to_bool(value)
        return cast(value)
    except (TypeError, ValueError) as e:
        raise ValueError(f"Invalid value for setting '{key}': {value!r} ({e})") from e


def split_list(value: str) -> List[str]:
    """Split a comma- or whitespace-separated list into stripped, non-empty items."""
    return [item for item in value.replace(",", " ").split() if item]


def get_list_setting(
    settings: Mapping[str, Any], key_path: str, default: Sequence[T], cast: Callable[[str], T]
) -> List[T]:
    """Retrieve a list-valued setting (``a, b, c`` or ``a b c``)."""
    key = key_path.strip().lower().replace("-", "_")
    value = settings.get(key)
    if value is None or (isinstance(value, str) and not value.strip()):
        return list(default)
    if not isinstance(value, str):
        return [item if not isinstance(item, str) else cast(item) for item in value]
    try:
        return [cast(item) for item in split_list(value)]
    except (TypeError, ValueError) as e:
        raise ValueError(f"Invalid list for setting '{key}': {value!r} ({e})") from e


def get_harness_config(settings: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Get experiment-runner configuration.

    Returns:
        Dictionary containing datasets, seeding, output and shift-grid settings
    """
    return {
        "datasets": get_list_setting(settings, "datasets", [], str),
        "seed": get_setting(settings, "seed", DEFAULT_SEED, int),
        "out": Path(get_setting(settings, "out", "results")),
        "reps": get_setting(settings, "reps", 7, int),
        "sizes": get_list_setting(settings, "sizes", DEFAULT_SIZES, int),
        "betas": get_list_setting(settings, "betas", DEFAULT_BETAS, float),
        "measures": get_list_setting(settings, "measures", [], str),
        "descriptor_dir": Path(get_setting(settings, "descriptor_dir", "data/descriptors")),
        "data_dir": Path(get_setting(settings, "data_dir", "data/raw")),
        "train_fraction": get_setting(settings, "train_fraction", 0.6, float),
        "size_cap": get_setting(settings, "size_cap", 3000, int),
    }


def get_model_config(settings: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Get classifier and ensemble configuration.

    Returns:
        Dictionary containing the smoothing grid, CV folds and ensemble size
    """
    return {
        "alpha_grid": get_list_setting(settings, "alpha_grid", DEFAULT_ALPHA_GRID, float),
        "cv_folds": get_setting(settings, "cv_folds", 5, int),
        "ensemble_size": get_setting(settings, "ensemble_size", 10, int),
    }


def get_hybrid_config(settings: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Get hybrid-ordering configuration.

    Returns:
        Dictionary containing grid resolutions and the measure pairs to combine
    """
    return {
        "gamma_grid_points": get_setting(settings, "gamma_grid_points", 101, int),
        "mu_grid_points": get_setting(settings, "mu_grid_points", 21, int),
        "uncertainty": get_setting(settings, "hybrid_uncertainty", "u_a"),
        "robustness": get_list_setting(settings, "hybrid_robustness", ["r_glob", "r_loc"], str),
    }


def get_app_config(settings: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Get general application configuration.

    Returns:
        Dictionary containing app configuration
    """
    return {
        "log_level": str(get_setting(settings, "log_level", "INFO")).upper(),
    }


def validate_configuration(settings: Mapping[str, Any]) -> Dict[str, str]:
    """
    Validate the configuration and return any problems found.

    Returns:
        Dictionary mapping the offending area to a human-readable message
    """
    issues: Dict[str, str] = {}

    harness = get_harness_config(settings)
    if harness["reps"] < 1:
        issues["reps"] = "reps must be at least 1"
    if any(size < 1 for size in harness["sizes"]):
        issues["sizes"] = "training sizes must be positive"
    if any(not (0.0 <= beta <= 1.0) for beta in harness["betas"]):
        issues["betas"] = "betas must lie in [0, 1]"
    if not (0.0 < harness["train_fraction"] < 1.0):
        issues["train_fraction"] = "train_fraction must be strictly between 0 and 1"
    if harness["size_cap"] < 2:
        issues["size_cap"] = "size_cap must be at least 2"

    model = get_model_config(settings)
    if not model["alpha_grid"] or any(alpha < 0 for alpha in model["alpha_grid"]):
        issues["alpha_grid"] = "alpha_grid must be a nonempty list of nonnegative values"
    if model["cv_folds"] < 2:
        issues["cv_folds"] = "cv_folds must be at least 2"
    if model["ensemble_size"] < 1:
        issues["ensemble_size"] = "ensemble_size must be at least 1"

    hybrid = get_hybrid_config(settings)
    if hybrid["gamma_grid_points"] < 2:
        issues["gamma_grid_points"] = "gamma grid needs at least the two endpoints"
    if hybrid["mu_grid_points"] < 1:
        issues["mu_grid_points"] = "mu grid must not be empty"

    app = get_app_config(settings)
    if app["log_level"] not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        issues["log_level"] = f"Unknown log level: {app['log_level']}"

    return issues
