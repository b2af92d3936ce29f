"""Seeded resampling: train/test splits, bootstrap samples, k-fold partitions and feature noise.

Every function takes an explicit seed and builds its own ``numpy`` PCG64
generator, so results depend only on (input, seed) and never on call order.
"""

from __future__ import annotations

import hashlib
import logging
from typing import List, Tuple

import numpy as np

from src.data.dataset import CategoricalDataset, SplitSpec
from src.utils.validation import validate_probability

logger = logging.getLogger(__name__)

_SEED_MASK = (1 << 64) - 1


def make_rng(seed: int) -> np.random.Generator:
    """The single generator family used everywhere: PCG64 seeded with a 64-bit integer."""
    return np.random.Generator(np.random.PCG64(int(seed) & _SEED_MASK))


def derive_seed(*parts: object) -> int:
    """Derive a 64-bit seed from a labelled key, e.g. ``derive_seed(master, "flare", 50, 0.1, 3)``.

    The key is hashed with blake2b, so derived seeds are stable across runs,
    platforms and execution order.
    """
    key = "\x1f".join(repr(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def _round_half_up(value: float) -> int:
    return int(np.floor(value + 0.5))


def split(dataset: CategoricalDataset, spec: SplitSpec) -> Tuple[CategoricalDataset, CategoricalDataset]:
    """
    Randomly split a dataset into train and test parts.

    If the dataset exceeds ``spec.size_cap`` a uniformly random subset of that
    size is drawn first; the (capped) instances are shuffled and the first
    ``round(train_fraction * m)`` become the training set.

    Raises:
        ValueError: If the dataset is empty
    """
    m = len(dataset)
    if m == 0:
        raise ValueError("Cannot split an empty dataset")
    rng = make_rng(spec.seed)
    pool = np.arange(m)
    if m > spec.size_cap:
        pool = np.sort(rng.choice(m, size=spec.size_cap, replace=False))
        logger.info("Capped dataset from %d to %d instances before splitting", m, spec.size_cap)
    pool = rng.permutation(pool)
    n_train = _round_half_up(spec.train_fraction * len(pool))
    return dataset.subset(pool[:n_train]), dataset.subset(pool[n_train:])


def split_with_test(
    train_pool: CategoricalDataset, test: CategoricalDataset, spec: SplitSpec
) -> Tuple[CategoricalDataset, CategoricalDataset]:
    """Respect a dataset-provided test set, capping the combined pool.

    When ``|train_pool| + |test|`` exceeds the cap, each side is subsampled
    uniformly to its share of the cap (``round(cap * |test| / total)`` test
    instances), so every seed yields parts of the same sizes.
    """
    n_train, n_test = len(train_pool), len(test)
    total = n_train + n_test
    if n_train == 0 or n_test == 0:
        raise ValueError("Provided train and test sets must both be nonempty")
    if total <= spec.size_cap:
        return train_pool, test
    keep_test = min(max(_round_half_up(spec.size_cap * n_test / total), 1), spec.size_cap - 1)
    keep_train = spec.size_cap - keep_test
    rng = make_rng(spec.seed)
    train_idx = np.sort(rng.choice(n_train, size=keep_train, replace=False))
    test_idx = np.sort(rng.choice(n_test, size=keep_test, replace=False))
    logger.info("Capped provided train/test pool from %d+%d to %d+%d instances", n_train, n_test, keep_train, keep_test)
    return train_pool.subset(train_idx), test.subset(test_idx)


def subsample(dataset: CategoricalDataset, size: int, seed: int) -> CategoricalDataset:
    """Draw ``size`` instances without replacement; the full size returns the input unchanged."""
    m = len(dataset)
    if size < 1 or size > m:
        raise ValueError(f"Cannot subsample {size} instances from {m}")
    if size == m:
        return dataset
    rng = make_rng(seed)
    return dataset.subset(rng.choice(m, size=size, replace=False))


def bootstrap_sample(dataset: CategoricalDataset, seed: int) -> CategoricalDataset:
    """Sample ``len(dataset)`` instances uniformly with replacement."""
    m = len(dataset)
    if m == 0:
        raise ValueError("Cannot bootstrap an empty dataset")
    rng = make_rng(seed)
    return dataset.subset(rng.integers(0, m, size=m))


def corrupt_features(dataset: CategoricalDataset, beta: float, seed: int) -> CategoricalDataset:
    """
    Replace each feature value with probability ``beta`` by a different value.

    The replacement is uniform over the remaining ``cardinality - 1`` values of
    that feature. Features of cardinality 1 are never altered; labels are untouched.

    Raises:
        ValueError: If beta is outside [0, 1]
    """
    valid, msg = validate_probability(beta, "beta")
    if not valid:
        raise ValueError(msg)
    features = dataset.features
    if features.size == 0:
        return dataset
    rng = make_rng(seed)
    cardinalities = np.asarray(dataset.schema.cardinalities, dtype=np.int64)
    corrupt = rng.random(features.shape) < beta
    corrupt &= (cardinalities >= 2)[np.newaxis, :]
    # a shift in 1..card-1 modulo card is uniform over the other values
    shifts = rng.integers(1, np.maximum(cardinalities, 2), size=features.shape)
    corrupted = np.where(corrupt, (features + shifts) % cardinalities, features)
    logger.debug("Corrupted %d of %d feature values (beta=%s)", int(corrupt.sum()), features.size, beta)
    return dataset.with_features(corrupted)


def kfold_indices(size: int, k: int, seed: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Index pairs ``(train_idx, validation_idx)`` for a shuffled k-fold partition.

    Validation parts differ in size by at most one.
    """
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if size < k:
        raise ValueError(f"Dataset of size {size} is smaller than k={k}")
    rng = make_rng(seed)
    parts = np.array_split(rng.permutation(size), k)
    folds = []
    for i, validation in enumerate(parts):
        train = np.concatenate([part for j, part in enumerate(parts) if j != i])
        folds.append((train, validation))
    return folds


def kfold(dataset: CategoricalDataset, k: int, seed: int) -> List[Tuple[CategoricalDataset, CategoricalDataset]]:
    """
    Partition a dataset into ``k`` (train_part, validation_part) pairs.

    Raises:
        ValueError: If k < 2 or the dataset has fewer than k instances
    """
    return [(dataset.subset(train), dataset.subset(val)) for train, val in kfold_indices(len(dataset), k, seed)]


__all__ = [
    "make_rng",
    "derive_seed",
    "split",
    "split_with_test",
    "subsample",
    "bootstrap_sample",
    "corrupt_features",
    "kfold_indices",
    "kfold",
]
