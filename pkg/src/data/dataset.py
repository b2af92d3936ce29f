"""Core data types: feature schema, categorical dataset and split settings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from src.utils.validation import validate_open_unit


def _frozen_array(values, dtype=np.int64) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, slots=True)
class FeatureSchema:
    """Shape of a discrete classification problem.

    ``cardinalities[i]`` is the number of values feature ``i`` can take; values
    are coded ``0 .. cardinalities[i] - 1``. Classes are coded ``0 .. class_count - 1``.
    """

    cardinalities: Tuple[int, ...]
    class_count: int
    feature_names: Optional[Tuple[str, ...]] = None
    value_names: Optional[Tuple[Tuple[str, ...], ...]] = None
    class_names: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "cardinalities", tuple(int(c) for c in self.cardinalities))
        if any(c < 1 for c in self.cardinalities):
            raise ValueError(f"Every feature cardinality must be >= 1, got {self.cardinalities}")
        if self.class_count < 2:
            raise ValueError(f"class_count must be >= 2, got {self.class_count}")
        if self.feature_names is not None and len(self.feature_names) != self.feature_count:
            raise ValueError("feature_names must have one entry per feature")
        if self.value_names is not None:
            if len(self.value_names) != self.feature_count:
                raise ValueError("value_names must have one entry per feature")
            for i, names in enumerate(self.value_names):
                if len(names) != self.cardinalities[i]:
                    raise ValueError(
                        f"value_names[{i}] has {len(names)} labels for cardinality {self.cardinalities[i]}"
                    )
        if self.class_names is not None and len(self.class_names) != self.class_count:
            raise ValueError("class_names must have one entry per class")

    @property
    def feature_count(self) -> int:
        return len(self.cardinalities)

    def check_features(self, features: Sequence[int]) -> np.ndarray:
        """Return ``features`` as an int array, raising ``ValueError`` if any value is out of range."""
        f = np.asarray(features, dtype=np.int64)
        if f.shape != (self.feature_count,):
            raise ValueError(f"Expected {self.feature_count} feature values, got shape {f.shape}")
        if np.any(f < 0) or np.any(f >= np.asarray(self.cardinalities)):
            raise ValueError(f"Feature vector {f.tolist()} out of range for cardinalities {self.cardinalities}")
        return f

    def check_class(self, label: int) -> int:
        """Return ``label`` as int, raising ``ValueError`` if it is not a class code."""
        if not (0 <= int(label) < self.class_count):
            raise ValueError(f"Class {label} out of range [0, {self.class_count})")
        return int(label)


@dataclass(frozen=True, slots=True, eq=False)
class CategoricalDataset:
    """Immutable collection of coded instances sharing one schema.

    ``features`` has shape ``(size, feature_count)``; ``labels`` has shape ``(size,)``.
    Both arrays are read-only.
    """

    schema: FeatureSchema
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        features = _frozen_array(self.features).reshape(-1, self.schema.feature_count)
        labels = _frozen_array(self.labels).reshape(-1)
        if features.shape[0] != labels.shape[0]:
            raise ValueError(f"{features.shape[0]} feature rows but {labels.shape[0]} labels")
        if features.size and (np.any(features < 0) or np.any(features >= np.asarray(self.schema.cardinalities))):
            raise ValueError("Feature value out of range for schema")
        if labels.size and (labels.min() < 0 or labels.max() >= self.schema.class_count):
            raise ValueError("Class label out of range for schema")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def size(self) -> int:
        return len(self)

    def subset(self, indices: Sequence[int]) -> "CategoricalDataset":
        """Dataset of the rows at ``indices`` (repeats allowed, order kept)."""
        idx = np.asarray(indices, dtype=np.int64)
        return CategoricalDataset(self.schema, self.features[idx], self.labels[idx])

    def with_features(self, features: np.ndarray) -> "CategoricalDataset":
        """Same labels and schema, replaced feature matrix."""
        return CategoricalDataset(self.schema, features, self.labels)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.schema.class_count)

    def equals(self, other: "CategoricalDataset") -> bool:
        """Bitwise equality of schema shape, features and labels."""
        return (
            self.schema.cardinalities == other.schema.cardinalities
            and self.schema.class_count == other.schema.class_count
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
        )


@dataclass(frozen=True, slots=True)
class SplitSpec:
    """Train/test split settings: 60/40 with a combined cap of 3000 instances by default."""

    seed: int
    train_fraction: float = 0.6
    size_cap: int = 3000

    def __post_init__(self) -> None:
        valid, msg = validate_open_unit(self.train_fraction, "train_fraction")
        if not valid:
            raise ValueError(msg)
        if self.size_cap < 1:
            raise ValueError(f"size_cap must be positive, got {self.size_cap}")


@dataclass(frozen=True, slots=True)
class LoadedDataset:
    """A prepared dataset, plus the test set when the source provides one."""

    name: str
    data: CategoricalDataset
    provided_test: Optional[CategoricalDataset] = None
    warnings: Tuple[str, ...] = field(default_factory=tuple)
