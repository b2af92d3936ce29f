"""Test suite for validation utilities.

Tests verify probability, signed-unit, nonnegative and grid checks.
"""
import math

import numpy as np

from src.utils.validation import (
    validate_grid,
    validate_nonnegative,
    validate_open_unit,
    validate_probability,
    validate_signed_unit,
)


class TestValidateProbability:
    """Tests for probability validation."""

    def test_bounds_inclusive(self):
        """Test that 0 and 1 are valid probabilities."""
        assert validate_probability(0.0)[0] is True
        assert validate_probability(1)[0] is True

    def test_out_of_range(self):
        """Test that values outside [0, 1] fail with the parameter name."""
        valid, msg = validate_probability(1.2, "beta")
        assert valid is False
        assert "beta" in msg

    def test_non_numeric(self):
        """Test that strings, booleans and NaN are rejected."""
        assert validate_probability("0.5")[0] is False
        assert validate_probability(True)[0] is False
        assert validate_probability(math.nan)[0] is False

    def test_numpy_scalars(self):
        """Test that numpy integer and float scalars are accepted and numpy booleans are not."""
        assert validate_probability(np.int64(0))[0] is True
        assert validate_probability(np.float32(0.25))[0] is True
        assert validate_probability(np.True_)[0] is False
        assert validate_signed_unit(np.int32(-1))[0] is True
        assert validate_nonnegative(np.uint8(3))[0] is True


class TestOtherRanges:
    """Tests for open-unit, signed-unit and nonnegative checks."""

    def test_open_unit(self):
        """Test that the endpoints are excluded."""
        assert validate_open_unit(0.6)[0] is True
        assert validate_open_unit(0.0)[0] is False
        assert validate_open_unit(1.0)[0] is False

    def test_signed_unit(self):
        """Test the [-1, 1] range used for the hybrid bias."""
        assert validate_signed_unit(-1.0)[0] is True
        assert validate_signed_unit(0.3)[0] is True
        assert validate_signed_unit(-1.1)[0] is False

    def test_nonnegative(self):
        """Test smoothing values."""
        assert validate_nonnegative(0)[0] is True
        assert validate_nonnegative(-0.001)[0] is False
        assert validate_nonnegative(math.inf)[0] is False


class TestValidateGrid:
    """Tests for hyperparameter grid validation."""

    def test_valid_grid(self):
        """Test a grid inside its bounds."""
        assert validate_grid([0.0, 0.5, 1.0], 0.0, 1.0)[0] is True

    def test_empty_grid(self):
        """Test that an empty grid fails."""
        valid, msg = validate_grid([], 0.0, 1.0, "gamma grid")
        assert valid is False
        assert "gamma grid" in msg

    def test_offending_values_listed(self):
        """Test that out-of-range values are reported."""
        valid, msg = validate_grid([0.5, 2.0], 0.0, 1.0)
        assert valid is False
        assert "2.0" in msg
