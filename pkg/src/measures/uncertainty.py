"""Uncertainty measures: probability of error, margin of confidence, entropy and
the ensemble-based total / aleatoric / epistemic decomposition.

Single-instance functions take a feature vector; the ``*_many`` variants take a
feature matrix and return one value per row. Both share the same code path.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.stats import entropy

from src.data.dataset import CategoricalDataset, FeatureSchema
from src.data.sampling import bootstrap_sample, derive_seed
from src.models.naive_bayes import DegenerateEvidenceError, GenerativeClassifier, NbcModel, fit

logger = logging.getLogger(__name__)

ENTROPY_FLOOR = 1e-300
EPISTEMIC_TOLERANCE = 1e-12
DEFAULT_ENSEMBLE_SIZE = 10


def entropy_bits(probabilities: np.ndarray) -> np.ndarray:
    """Shannon entropy in bits along the last axis, with 0 log 0 = 0."""
    p = np.array(probabilities, dtype=np.float64, copy=True)
    p[p < ENTROPY_FLOOR] = 0.0
    return np.asarray(entropy(p, base=2, axis=-1), dtype=np.float64)


def _as_matrix(model: GenerativeClassifier, features: np.ndarray) -> np.ndarray:
    x = np.asarray(features, dtype=np.int64)
    return model.schema.check_features(x)[np.newaxis, :] if x.ndim == 1 else x


def _predicted(conditionals: np.ndarray, predictions: np.ndarray) -> np.ndarray:
    return conditionals[np.arange(conditionals.shape[0]), predictions]


def u_max_many(model: NbcModel, features: np.ndarray) -> np.ndarray:
    """1 - P(c_hat | f) per instance."""
    x = _as_matrix(model, features)
    return 1.0 - _predicted(model.conditional_many(x), model.predict_many(x))


def u_conf_many(model: NbcModel, features: np.ndarray) -> np.ndarray:
    """P(c_hat | f) - max over other classes of P(c | f); larger means MORE reliable."""
    x = _as_matrix(model, features)
    conditionals = model.conditional_many(x)
    predictions = model.predict_many(x)
    rivals = conditionals.copy()
    rivals[np.arange(x.shape[0]), predictions] = -np.inf
    return _predicted(conditionals, predictions) - rivals.max(axis=1)


def u_entropy_many(model: NbcModel, features: np.ndarray) -> np.ndarray:
    return entropy_bits(model.conditional_many(_as_matrix(model, features)))


def u_max(model: NbcModel, f: Sequence[int]) -> float:
    return float(u_max_many(model, np.asarray(f))[0])


def u_conf(model: NbcModel, f: Sequence[int]) -> float:
    return float(u_conf_many(model, np.asarray(f))[0])


def u_entropy(model: NbcModel, f: Sequence[int]) -> float:
    """Entropy (bits) of the class posterior."""
    return float(u_entropy_many(model, np.asarray(f))[0])


@dataclass(frozen=True, slots=True)
class Ensemble:
    """Models fit on independent bootstrap resamples of one training set."""

    members: Tuple[NbcModel, ...]
    seeds: Tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("An ensemble needs at least one member")
        if len(self.members) != len(self.seeds):
            raise ValueError("One seed per ensemble member is required")
        first = self.members[0].schema
        for member in self.members[1:]:
            if member.schema.cardinalities != first.cardinalities or member.schema.class_count != first.class_count:
                raise ValueError("Ensemble members must share one schema")

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def schema(self) -> FeatureSchema:
        return self.members[0].schema


def fit_ensemble(
    train: CategoricalDataset, alpha: float, size: int = DEFAULT_ENSEMBLE_SIZE, seed: int = 0
) -> Ensemble:
    """
    Fit ``size`` models, each on its own bootstrap sample of ``train``.

    Members reuse ``alpha`` (already tuned on the full training set). Member
    ``i`` draws its bootstrap with ``derive_seed(seed, "bootstrap", i)``.

    Raises:
        ValueError: If size < 1 or the training set is empty
    """
    if size < 1:
        raise ValueError(f"Ensemble size must be at least 1, got {size}")
    seeds = tuple(derive_seed(seed, "bootstrap", i) for i in range(size))
    members = tuple(fit(bootstrap_sample(train, member_seed), alpha) for member_seed in seeds)
    logger.debug("Fit ensemble of %d members (alpha=%s)", size, alpha)
    return Ensemble(members, seeds)


def member_conditionals(ensemble: Ensemble, features: np.ndarray) -> np.ndarray:
    """Class posteriors of every member, shape ``(size, m, class_count)``.

    Raises:
        DegenerateEvidenceError: Carrying the index of the first failing member
    """
    x = np.asarray(features, dtype=np.int64)
    x = ensemble.schema.check_features(x)[np.newaxis, :] if x.ndim == 1 else x
    stacked = []
    for index, member in enumerate(ensemble.members):
        try:
            stacked.append(member.conditional_many(x))
        except DegenerateEvidenceError as e:
            raise DegenerateEvidenceError(str(e), member_index=index) from e
    return np.stack(stacked)


def decompose(conditionals: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Total, aleatoric and epistemic uncertainty from member posteriors.

    Args:
        conditionals: Array of shape ``(members, m, class_count)``

    Returns:
        ``(u_t, u_a, u_e)``: u_t is the entropy of the mean member posterior, u_a
        the mean of the member entropies and u_e = u_t - u_a, with values within
        1e-12 below zero clamped to 0

    Raises:
        FloatingPointError: If u_e falls further below zero than rounding allows
    """
    conditionals = np.asarray(conditionals, dtype=np.float64)
    total = entropy_bits(conditionals.mean(axis=0))
    aleatoric = entropy_bits(conditionals).mean(axis=0)
    epistemic = total - aleatoric
    if np.any(epistemic < -EPISTEMIC_TOLERANCE):
        raise FloatingPointError(f"Epistemic uncertainty {epistemic.min()} is negative beyond rounding")
    epistemic = np.where(epistemic < 0.0, 0.0, epistemic)
    return total, aleatoric, epistemic


def ensemble_uncertainties_many(
    ensemble: Ensemble, features: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-instance (u_t, u_a, u_e) arrays for a feature matrix."""
    return decompose(member_conditionals(ensemble, features))


def ensemble_uncertainties(ensemble: Ensemble, f: Sequence[int]) -> Tuple[float, float, float]:
    """(u_t, u_a, u_e) for one instance."""
    total, aleatoric, epistemic = ensemble_uncertainties_many(ensemble, np.asarray(f))
    return float(total[0]), float(aleatoric[0]), float(epistemic[0])


__all__ = [
    "entropy_bits",
    "u_max",
    "u_conf",
    "u_entropy",
    "u_max_many",
    "u_conf_many",
    "u_entropy_many",
    "Ensemble",
    "fit_ensemble",
    "member_conditionals",
    "decompose",
    "ensemble_uncertainties",
    "ensemble_uncertainties_many",
]
