"""
Dataset registry - maps dataset ids to preparation descriptors and caches loads.

Descriptors live as ``<id>.cfg`` files in a descriptor directory; their
relative ``path``/``test_path`` entries resolve against a raw-data directory.
Descriptors can also be registered in memory. Prepared datasets are memoized
in an LRU cache keyed by dataset id and the modification times of the files
involved, so edited files are picked up without an explicit refresh.

Usage:
    registry = get_registry(Path("data/descriptors"), Path("data/raw"))
    loaded = registry.load("tic-tac-toe")
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, Hashable, List, Optional, Tuple, Union

from cachetools import LRUCache

from src.data.dataset import LoadedDataset
from src.data.preparation import DatasetDescriptor, describe, load_descriptor, prepare

logger = logging.getLogger(__name__)

DESCRIPTOR_SUFFIX = ".cfg"


def _mtime(path: Optional[Path]) -> Optional[float]:
    if path is None:
        return None
    try:
        return path.stat().st_mtime
    except OSError:
        return None


class DatasetRegistry:
    """
    Resolve dataset ids and load prepared datasets with caching.

    Usage:
        registry = DatasetRegistry(Path("data/descriptors"), Path("data/raw"))
        registry.available()      # ['car-evaluation', 'solar-flare', ...]
        loaded = registry.load("solar-flare")
    """

    def __init__(self, descriptor_dir: Optional[Path] = None, data_dir: Optional[Path] = None, cache_size: int = 16):
        self.descriptor_dir = Path(descriptor_dir) if descriptor_dir is not None else None
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self._registered: Dict[str, DatasetDescriptor] = {}
        self._cache: LRUCache = LRUCache(maxsize=cache_size)

    def register(self, descriptor: DatasetDescriptor) -> None:
        """Add (or replace) an in-memory descriptor; it shadows a file of the same id."""
        self._registered[descriptor.name] = descriptor
        logger.debug("Registered dataset '%s'", descriptor.name)

    def _descriptor_file(self, dataset_id: str) -> Optional[Path]:
        if self.descriptor_dir is None:
            return None
        candidate = self.descriptor_dir / f"{dataset_id}{DESCRIPTOR_SUFFIX}"
        return candidate if candidate.exists() else None

    def available(self) -> List[str]:
        """Sorted ids of every registered or file-backed dataset."""
        ids = set(self._registered)
        if self.descriptor_dir is not None and self.descriptor_dir.is_dir():
            ids.update(p.stem for p in self.descriptor_dir.glob(f"*{DESCRIPTOR_SUFFIX}"))
        return sorted(ids)

    def descriptor(self, dataset_id: str) -> DatasetDescriptor:
        """
        Look up the descriptor for a dataset id.

        Raises:
            KeyError: If the id is neither registered nor backed by a descriptor file
        """
        if dataset_id in self._registered:
            return self._registered[dataset_id]
        descriptor_file = self._descriptor_file(dataset_id)
        if descriptor_file is None:
            raise KeyError(f"Unknown dataset '{dataset_id}'. Available: {', '.join(self.available()) or 'none'}")
        descriptor = load_descriptor(descriptor_file, self.data_dir)
        descriptor.name = dataset_id
        return descriptor

    def _cache_key(self, dataset_id: str, descriptor: DatasetDescriptor) -> Tuple[Hashable, ...]:
        return (
            dataset_id,
            _mtime(self._descriptor_file(dataset_id)),
            _mtime(descriptor.path),
            _mtime(descriptor.test_path),
        )

    def load(self, dataset_id: str) -> LoadedDataset:
        """
        Load a prepared dataset, reusing a cached copy when no file changed.

        Raises:
            KeyError: If the id is unknown
            FileNotFoundError: If the raw data file is missing
            ValueError: If preparation fails
        """
        descriptor = self.descriptor(dataset_id)
        key = self._cache_key(dataset_id, descriptor)
        cached = self._cache.get(key)
        if cached is not None:
            logger.debug("Cache hit for dataset '%s'", dataset_id)
            return cached
        loaded = prepare(descriptor)
        self._cache[key] = loaded
        return loaded

    def get_status(self) -> Dict[str, Dict[str, Union[bool, str, None]]]:
        """Availability of the raw files behind every known dataset id."""
        status: Dict[str, Dict[str, Union[bool, str, None]]] = {}
        for dataset_id in self.available():
            try:
                descriptor = self.descriptor(dataset_id)
            except (ValueError, OSError) as e:
                status[dataset_id] = {"available": False, "path": None, "error": str(e)}
                continue
            path = descriptor.path
            test_path = descriptor.test_path
            status[dataset_id] = {
                "available": bool(path and path.exists() and (test_path is None or test_path.exists())),
                "path": str(path) if path else None,
                "test_path": str(test_path) if test_path else None,
            }
        return status

    def validate_dataset(self, dataset_id: str) -> Dict[str, object]:
        """
        Load a dataset and report basic integrity information.

        Returns:
            Dictionary with a ``valid`` flag plus instance/feature/class counts or the error
        """
        try:
            loaded = self.load(dataset_id)
        except (KeyError, OSError, ValueError) as e:
            return {"valid": False, "error": str(e), "instances": 0}
        result: Dict[str, object] = {"valid": True, **describe(loaded.data)}
        if loaded.provided_test is not None:
            result["provided_test_instances"] = len(loaded.provided_test)
        if loaded.warnings:
            result["warnings"] = list(loaded.warnings)
        return result

    def clear_cache(self) -> None:
        self._cache.clear()
        logger.info("Dataset cache cleared")


# Global registry instance
_registry: Optional[DatasetRegistry] = None


def get_registry(descriptor_dir: Optional[Path] = None, data_dir: Optional[Path] = None) -> DatasetRegistry:
    """Get the shared registry, recreating it when different directories are requested."""
    global _registry
    wanted = (
        Path(descriptor_dir) if descriptor_dir is not None else None,
        Path(data_dir) if data_dir is not None else None,
    )
    if _registry is None or (_registry.descriptor_dir, _registry.data_dir) != wanted:
        _registry = DatasetRegistry(*wanted)
    return _registry


def refresh_registry_cache() -> None:
    """Drop every cached dataset of the shared registry."""
    if _registry is not None:
        _registry.clear_cache()


__all__ = ["DESCRIPTOR_SUFFIX", "DatasetRegistry", "get_registry", "refresh_registry_cache"]
