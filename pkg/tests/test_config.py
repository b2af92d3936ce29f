"""Test suite for configuration management.

Tests verify settings-file parsing, typed accessors with fallbacks, the
per-area config builders and configuration validation.
"""
from pathlib import Path

import pytest

from src.utils.config import (
    DEFAULT_SEED,
    get_app_config,
    get_harness_config,
    get_hybrid_config,
    get_list_setting,
    get_model_config,
    get_setting,
    load_settings,
    parse_settings_text,
    validate_configuration,
)


class TestParseSettings:
    """Tests for key = value parsing."""

    def test_comments_and_normalization(self):
        """Test that comments are stripped and keys normalized."""
        settings = parse_settings_text("# run\nSeed = 7  # master\n\nlog-level = debug\n")
        assert settings == {"seed": "7", "log_level": "debug"}

    def test_later_duplicate_wins(self):
        """Test that a redefined key keeps its last value."""
        assert parse_settings_text("reps = 3\nreps = 5\n")["reps"] == "5"

    def test_malformed_line(self):
        """Test that a line without '=' raises."""
        with pytest.raises(ValueError, match="Line 2"):
            parse_settings_text("seed = 1\nnonsense\n")

    def test_load_missing_file(self, tmp_path):
        """Test that a missing settings file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            load_settings(tmp_path / "absent.cfg")

    def test_load_file(self, tmp_path):
        """Test reading settings from disk."""
        path = tmp_path / "run.cfg"
        path.write_text("datasets = a, b\n")
        assert load_settings(path) == {"datasets": "a, b"}


class TestAccessors:
    """Tests for typed setting accessors."""

    def test_get_setting_cast_and_default(self):
        """Test casting of string values and fallback for missing keys."""
        assert get_setting({"seed": "7"}, "seed", 0, int) == 7
        assert get_setting({}, "seed", 3, int) == 3
        assert get_setting({"seed": "  "}, "seed", 3, int) == 3

    def test_get_setting_bool(self):
        """Test boolean strings."""
        assert get_setting({"header": "no"}, "header", True, bool) is False
        assert get_setting({"header": "Yes"}, "header", False, bool) is True
        with pytest.raises(ValueError):
            get_setting({"header": "maybe"}, "header", True, bool)

    def test_typed_values_pass_through(self):
        """Test that already-typed values (CLI overrides) are returned unchanged."""
        assert get_setting({"seed": 11}, "seed", 0, int) == 11
        assert get_list_setting({"sizes": [50, 100]}, "sizes", [], int) == [50, 100]

    def test_get_list_setting(self):
        """Test comma and whitespace separated lists."""
        assert get_list_setting({"betas": "0, 0.1 0.2"}, "betas", [], float) == [0.0, 0.1, 0.2]
        with pytest.raises(ValueError):
            get_list_setting({"sizes": "50, many"}, "sizes", [], int)

    def test_invalid_cast(self):
        """Test that an unconvertible value names the key."""
        with pytest.raises(ValueError, match="reps"):
            get_setting({"reps": "seven"}, "reps", 7, int)


class TestConfigBuilders:
    """Tests for per-area configuration dictionaries."""

    def test_harness_defaults(self):
        """Test the harness defaults."""
        harness = get_harness_config({})
        assert harness["seed"] == DEFAULT_SEED
        assert harness["reps"] == 7
        assert harness["sizes"] == [50, 100, 200]
        assert harness["betas"] == [0.0, 0.1, 0.2]
        assert harness["train_fraction"] == 0.6
        assert harness["size_cap"] == 3000
        assert harness["out"] == Path("results")

    def test_model_and_hybrid_defaults(self):
        """Test classifier and hybrid defaults."""
        model = get_model_config({})
        assert model["cv_folds"] == 5 and model["ensemble_size"] == 10
        hybrid = get_hybrid_config({})
        assert hybrid["gamma_grid_points"] == 101
        assert hybrid["mu_grid_points"] == 21
        assert hybrid["uncertainty"] == "u_a"
        assert hybrid["robustness"] == ["r_glob", "r_loc"]

    def test_app_config_uppercases_level(self):
        """Test that the log level is normalized."""
        assert get_app_config({"log_level": "debug"})["log_level"] == "DEBUG"


class TestValidateConfiguration:
    """Tests for configuration validation."""

    def test_defaults_are_valid(self):
        """Test that an empty configuration has no issues."""
        assert validate_configuration({}) == {}

    def test_reports_every_problem(self):
        """Test that each invalid area is reported."""
        issues = validate_configuration(
            {"reps": "0", "betas": "0.5, 1.5", "cv_folds": "1", "log_level": "loud", "train_fraction": "1"}
        )
        assert set(issues) == {"reps", "betas", "cv_folds", "log_level", "train_fraction"}
