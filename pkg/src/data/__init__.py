"""Data package: categorical dataset types, preparation, resampling and the dataset registry."""

from .dataset import CategoricalDataset, FeatureSchema, LoadedDataset, SplitSpec
from .preparation import DatasetDescriptor, TargetTransform, load_dataset, load_descriptor, prepare
from .registry import DatasetRegistry, get_registry, refresh_registry_cache
from .sampling import (
    bootstrap_sample,
    corrupt_features,
    derive_seed,
    kfold,
    kfold_indices,
    make_rng,
    split,
    split_with_test,
    subsample,
)

__all__ = [
    "CategoricalDataset",
    "FeatureSchema",
    "LoadedDataset",
    "SplitSpec",
    "DatasetDescriptor",
    "TargetTransform",
    "load_dataset",
    "load_descriptor",
    "prepare",
    "DatasetRegistry",
    "get_registry",
    "refresh_registry_cache",
    "bootstrap_sample",
    "corrupt_features",
    "derive_seed",
    "kfold",
    "kfold_indices",
    "make_rng",
    "split",
    "split_with_test",
    "subsample",
]
