"""Pytest configuration helpers.

Ensure the project root is on sys.path so tests can import the `src` package
when pytest is invoked from the repository root or an isolated test runner,
and provide small datasets and fitted models shared by the suites.
"""

import sys
from pathlib import Path

import numpy as np
import pytest


def pytest_configure():
    # Insert the repository root (parent of the tests directory) at the front
    repo_root = Path(__file__).resolve().parents[1]
    sys.path.insert(0, str(repo_root))


@pytest.fixture
def sample_fixtures_dir():
    """Return the path to the test fixtures directory."""
    return Path(__file__).parent / "fixtures"


@pytest.fixture
def toy_schema():
    """Two features (binary and ternary), two classes."""
    from src.data.dataset import FeatureSchema

    return FeatureSchema(cardinalities=(2, 3), class_count=2)


@pytest.fixture
def toy_dataset(toy_schema):
    """Eight instances where feature 0 mostly determines the class."""
    from src.data.dataset import CategoricalDataset

    features = [[0, 0], [0, 1], [0, 2], [0, 0], [1, 2], [1, 1], [1, 2], [1, 0]]
    labels = [0, 0, 0, 1, 1, 1, 1, 0]
    return CategoricalDataset(toy_schema, np.array(features), np.array(labels))


@pytest.fixture
def random_dataset_factory():
    """
    Factory for reproducible synthetic datasets.

    Labels follow feature 0 with probability ``signal`` and are uniform otherwise.
    """
    from src.data.dataset import CategoricalDataset, FeatureSchema
    from src.data.sampling import make_rng

    def _make(seed=0, size=120, cardinalities=(3, 2, 4), class_count=2, signal=0.8):
        rng = make_rng(seed)
        schema = FeatureSchema(cardinalities=tuple(cardinalities), class_count=class_count)
        features = np.column_stack([rng.integers(0, c, size=size) for c in cardinalities])
        informative = features[:, 0] % class_count
        noise = rng.integers(0, class_count, size=size)
        labels = np.where(rng.random(size) < signal, informative, noise)
        return CategoricalDataset(schema, features, labels)

    return _make


@pytest.fixture
def random_model_factory(random_dataset_factory):
    """Factory for naive Bayes models fit on synthetic data."""
    from src.models.naive_bayes import fit

    def _make(seed=0, size=60, cardinalities=(3, 2, 4), class_count=2, alpha=1.0):
        return fit(random_dataset_factory(seed, size, cardinalities, class_count), alpha)

    return _make
