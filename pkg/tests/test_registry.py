"""Test suite for the dataset registry.

Tests verify descriptor lookup, cached loading keyed by file modification
times, status reporting and in-memory registration.
"""
import os
import shutil

import pytest

from src.data.preparation import DatasetDescriptor
from src.data.registry import DatasetRegistry, get_registry, refresh_registry_cache


@pytest.fixture
def registry_dirs(tmp_path, sample_fixtures_dir):
    """Descriptor and raw-data directories holding the weather fixture."""
    descriptor_dir = tmp_path / "descriptors"
    data_dir = tmp_path / "raw"
    descriptor_dir.mkdir()
    data_dir.mkdir()
    shutil.copy(sample_fixtures_dir / "weather.csv", data_dir / "weather.csv")
    (descriptor_dir / "weather.cfg").write_text("path = weather.csv\nclass_column = play\ndrop_columns = hours\n")
    (descriptor_dir / "ghost.cfg").write_text("path = ghost.csv\nclass_column = class\n")
    return descriptor_dir, data_dir


class TestDatasetRegistry:
    """Tests for DatasetRegistry."""

    def test_available_lists_descriptor_files(self, registry_dirs):
        """Test that every descriptor file is listed by its stem."""
        registry = DatasetRegistry(*registry_dirs)
        assert registry.available() == ["ghost", "weather"]

    def test_unknown_id(self, registry_dirs):
        """Test that an unknown dataset id raises KeyError."""
        registry = DatasetRegistry(*registry_dirs)
        with pytest.raises(KeyError):
            registry.descriptor("iris")

    def test_load_uses_cache(self, registry_dirs):
        """Test that a second load returns the cached dataset."""
        registry = DatasetRegistry(*registry_dirs)
        first = registry.load("weather")
        assert first.name == "weather"
        assert len(first.data) == 13
        assert registry.load("weather") is first

    def test_modified_file_reloads(self, registry_dirs):
        """Test that a changed data file invalidates the cached entry."""
        _, data_dir = registry_dirs
        registry = DatasetRegistry(*registry_dirs)
        first = registry.load("weather")
        path = data_dir / "weather.csv"
        stat = path.stat()
        os.utime(path, (stat.st_atime, stat.st_mtime + 10))
        assert registry.load("weather") is not first

    def test_clear_cache(self, registry_dirs):
        """Test that clearing the cache forces a fresh load."""
        registry = DatasetRegistry(*registry_dirs)
        first = registry.load("weather")
        registry.clear_cache()
        assert registry.load("weather") is not first

    def test_missing_data_file(self, registry_dirs):
        """Test that a descriptor pointing to a missing file raises FileNotFoundError."""
        registry = DatasetRegistry(*registry_dirs)
        with pytest.raises(FileNotFoundError):
            registry.load("ghost")

    def test_status(self, registry_dirs):
        """Test availability flags per dataset."""
        status = DatasetRegistry(*registry_dirs).get_status()
        assert status["weather"]["available"] is True
        assert status["ghost"]["available"] is False

    def test_validate_dataset(self, registry_dirs):
        """Test integrity reports for good and broken datasets."""
        registry = DatasetRegistry(*registry_dirs)
        good = registry.validate_dataset("weather")
        assert good["valid"] is True
        assert good["instances"] == 13
        bad = registry.validate_dataset("ghost")
        assert bad["valid"] is False
        assert "error" in bad

    def test_register_shadows_file(self, registry_dirs, sample_fixtures_dir):
        """Test that an in-memory descriptor takes precedence over a file."""
        registry = DatasetRegistry(*registry_dirs)
        registry.register(
            DatasetDescriptor(name="ghost", class_column="play", path=sample_fixtures_dir / "weather.csv")
        )
        assert len(registry.load("ghost").data) == 12, "Both rows with missing values are removed"


class TestSharedRegistry:
    """Tests for the module-level registry accessor."""

    def test_same_directories_same_instance(self, registry_dirs):
        """Test that the shared registry is reused for the same directories."""
        assert get_registry(*registry_dirs) is get_registry(*registry_dirs)

    def test_refresh_clears_cache(self, registry_dirs):
        """Test that refreshing drops cached datasets."""
        registry = get_registry(*registry_dirs)
        first = registry.load("weather")
        refresh_registry_cache()
        assert registry.load("weather") is not first
