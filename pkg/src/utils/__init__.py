"""Utilities package: settings, validation helpers and performance monitoring."""

from .config import (
    get_app_config,
    get_harness_config,
    get_hybrid_config,
    get_model_config,
    get_setting,
    load_settings,
    validate_configuration,
)
from .performance import PerformanceTracker, monitor_performance, timed_stage
from .validation import validate_grid, validate_nonnegative, validate_open_unit, validate_probability

__all__ = [
    "get_app_config",
    "get_harness_config",
    "get_hybrid_config",
    "get_model_config",
    "get_setting",
    "load_settings",
    "validate_configuration",
    "PerformanceTracker",
    "monitor_performance",
    "timed_stage",
    "validate_grid",
    "validate_nonnegative",
    "validate_open_unit",
    "validate_probability",
]
