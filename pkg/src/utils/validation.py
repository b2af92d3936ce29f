"""Validation utilities for probabilities, radii, weights and search grids.

Small, self-contained helpers used across the library and tests. Each helper
returns ``(is_valid, message)``; callers decide whether to raise.
"""

import math
from numbers import Real
from typing import Iterable, Tuple


def _is_number(value: object) -> bool:
    """Real numbers including numpy scalars; booleans are not accepted."""
    return isinstance(value, Real) and not isinstance(value, bool)


def validate_probability(value: float, name: str = "value") -> Tuple[bool, str]:
    """
    Validate that a value is a finite probability in [0, 1].

    Args:
        value: Value to check
        name: Parameter name used in the message

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not _is_number(value):
        return False, f"{name} must be numeric"
    if not math.isfinite(value):
        return False, f"{name} must be finite"
    if not (0.0 <= value <= 1.0):
        return False, f"{name} must be between 0 and 1, got {value}"
    return True, f"Valid {name}"


def validate_open_unit(value: float, name: str = "value") -> Tuple[bool, str]:
    """Validate that a value lies strictly between 0 and 1."""
    valid, msg = validate_probability(value, name)
    if not valid:
        return valid, msg
    if value in (0.0, 1.0):
        return False, f"{name} must be strictly between 0 and 1, got {value}"
    return True, f"Valid {name}"


def validate_signed_unit(value: float, name: str = "value") -> Tuple[bool, str]:
    """Validate that a value is a finite number in [-1, 1]."""
    if not _is_number(value):
        return False, f"{name} must be numeric"
    if not math.isfinite(value) or not (-1.0 <= value <= 1.0):
        return False, f"{name} must be between -1 and 1, got {value}"
    return True, f"Valid {name}"


def validate_nonnegative(value: float, name: str = "value") -> Tuple[bool, str]:
    """Validate that a value is a finite, nonnegative number."""
    if not _is_number(value):
        return False, f"{name} must be numeric"
    if not math.isfinite(value) or value < 0:
        return False, f"{name} must be a finite nonnegative number, got {value}"
    return True, f"Valid {name}"


def validate_grid(grid: Iterable[float], low: float, high: float, name: str = "grid") -> Tuple[bool, str]:
    """
    Validate a hyperparameter grid.

    Args:
        grid: Candidate values
        low: Inclusive lower bound for every candidate
        high: Inclusive upper bound for every candidate
        name: Grid name used in the message

    Returns:
        Tuple of (is_valid, error_message)
    """
    values = list(grid)
    if not values:
        return False, f"{name} must not be empty"
    issues = [v for v in values if not math.isfinite(v) or not (low <= v <= high)]
    if issues:
        return False, f"{name} values must lie in [{low}, {high}]; offending: {issues[:5]}"
    return True, f"Valid {name}"
