"""Naive Bayes classifier over discrete features with Laplace smoothing.

Probabilities are stored as tables and evaluated in log space: the log-joint
of an instance is the sum of the log prior and one log conditional per
feature. The terms are summed in sorted order, so two instances whose factor
multisets coincide get bitwise-identical joints, and ties between classes are
exact ties.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence, Tuple, runtime_checkable

import numpy as np
from scipy.special import logsumexp

from src.data.dataset import CategoricalDataset, FeatureSchema
from src.data.sampling import kfold_indices
from src.utils.config import DEFAULT_ALPHA_GRID
from src.utils.validation import validate_grid, validate_nonnegative

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-9


class DegenerateEvidenceError(ValueError):
    """Every class has joint probability zero for an instance (only possible with alpha = 0)."""

    def __init__(self, message: str, member_index: Optional[int] = None):
        if member_index is not None:
            message = f"{message} (ensemble member {member_index})"
        super().__init__(message)
        self.member_index = member_index


@runtime_checkable
class GenerativeClassifier(Protocol):
    """What the reliability measures need from a generative classifier.

    ``conditional`` is Bayes' rule applied to ``joint_prob``; ``predict`` is its
    argmax with ties going to the lowest class index.
    """

    schema: FeatureSchema

    def joint_prob(self, c: int, f: Sequence[int]) -> float: ...

    def conditional(self, f: Sequence[int]) -> np.ndarray: ...

    def predict(self, f: Sequence[int]) -> int: ...

    def log_joint_many(self, features: np.ndarray) -> np.ndarray: ...


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, slots=True, eq=False)
class NbcModel:
    """A fitted naive Bayes model.

    ``conditionals[i][c, v]`` is P(f_i = v | c); ``class_prior[c]`` is P(c).
    """

    schema: FeatureSchema
    class_prior: np.ndarray
    conditionals: Tuple[np.ndarray, ...]
    smoothing: float
    _log_prior: np.ndarray = field(init=False, repr=False)
    _log_conditionals: Tuple[np.ndarray, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        prior = _readonly(self.class_prior)
        tables = tuple(_readonly(t) for t in self.conditionals)
        c = self.schema.class_count
        if prior.shape != (c,):
            raise ValueError(f"class_prior must have shape ({c},), got {prior.shape}")
        if len(tables) != self.schema.feature_count:
            raise ValueError(f"Expected {self.schema.feature_count} conditional tables, got {len(tables)}")
        for i, table in enumerate(tables):
            if table.shape != (c, self.schema.cardinalities[i]):
                raise ValueError(f"conditionals[{i}] must have shape {(c, self.schema.cardinalities[i])}")
        for name, probabilities in [("class_prior", prior[np.newaxis, :])] + [
            (f"conditionals[{i}]", t) for i, t in enumerate(tables)
        ]:
            sums = probabilities.sum(axis=1)
            if np.any(probabilities < 0) or not np.allclose(sums, 1.0, rtol=0, atol=NORMALIZATION_TOLERANCE):
                raise ValueError(f"{name} rows must be probability vectors")
        with np.errstate(divide="ignore"):
            log_prior = _readonly(np.log(prior))
            log_tables = tuple(_readonly(np.log(t)) for t in tables)
        object.__setattr__(self, "class_prior", prior)
        object.__setattr__(self, "conditionals", tables)
        object.__setattr__(self, "_log_prior", log_prior)
        object.__setattr__(self, "_log_conditionals", log_tables)

    def _check_matrix(self, features: np.ndarray) -> np.ndarray:
        x = np.asarray(features, dtype=np.int64)
        if x.ndim != 2 or x.shape[1] != self.schema.feature_count:
            raise ValueError(f"Expected a (m, {self.schema.feature_count}) feature matrix, got shape {x.shape}")
        if x.size and (np.any(x < 0) or np.any(x >= np.asarray(self.schema.cardinalities))):
            raise ValueError("Feature value out of range for schema")
        return x

    def log_terms_many(self, features: np.ndarray) -> np.ndarray:
        """Log factors per instance and class, shape ``(m, class_count, feature_count + 1)``.

        Column 0 holds the log prior, column ``i + 1`` the log conditional of feature ``i``.
        """
        x = self._check_matrix(features)
        m = x.shape[0]
        terms = np.empty((m, self.schema.class_count, self.schema.feature_count + 1))
        terms[:, :, 0] = self._log_prior
        for i, log_table in enumerate(self._log_conditionals):
            terms[:, :, i + 1] = log_table[:, x[:, i]].T
        return terms

    def log_joint_many(self, features: np.ndarray) -> np.ndarray:
        """Log joint probabilities, shape ``(m, class_count)``; ``-inf`` marks zero joints."""
        return np.sort(self.log_terms_many(features), axis=2).sum(axis=2)

    def log_joint(self, f: Sequence[int]) -> np.ndarray:
        return self.log_joint_many(self.schema.check_features(f)[np.newaxis, :])[0]

    def joint_prob(self, c: int, f: Sequence[int]) -> float:
        """P(c) * prod_i P(f_i | c)."""
        c = self.schema.check_class(c)
        return float(np.exp(self.log_joint(f)[c]))

    def joint_many(self, features: np.ndarray) -> np.ndarray:
        return np.exp(self.log_joint_many(features))

    def conditional_many(self, features: np.ndarray) -> np.ndarray:
        """
        Bayes-rule class posteriors, shape ``(m, class_count)``.

        Raises:
            DegenerateEvidenceError: If every joint of some instance is zero
        """
        log_joint = self.log_joint_many(features)
        degenerate = np.isneginf(log_joint.max(axis=1)) if log_joint.size else np.zeros(0, dtype=bool)
        if np.any(degenerate):
            first = int(np.flatnonzero(degenerate)[0])
            raise DegenerateEvidenceError(f"All joint probabilities are zero for instance {first}")
        return np.exp(log_joint - logsumexp(log_joint, axis=1, keepdims=True))

    def conditional(self, f: Sequence[int]) -> np.ndarray:
        return self.conditional_many(self.schema.check_features(f)[np.newaxis, :])[0]

    def predict_many(self, features: np.ndarray) -> np.ndarray:
        """Argmax of the log joint per instance, lowest class index on ties."""
        log_joint = self.log_joint_many(features)
        if log_joint.size and np.any(np.isneginf(log_joint.max(axis=1))):
            first = int(np.flatnonzero(np.isneginf(log_joint.max(axis=1)))[0])
            raise DegenerateEvidenceError(f"All joint probabilities are zero for instance {first}")
        return np.argmax(log_joint, axis=1).astype(np.int64)

    def predict(self, f: Sequence[int]) -> int:
        return int(self.predict_many(self.schema.check_features(f)[np.newaxis, :])[0])

    def local_parameters_many(self, features: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """The local parameters that enter each instance's joints.

        Returns:
            ``(class_prior, factors)`` where ``factors[j, c, i] = P(f_i = x[j, i] | c)``
        """
        x = self._check_matrix(features)
        factors = np.empty((x.shape[0], self.schema.class_count, self.schema.feature_count))
        for i, table in enumerate(self.conditionals):
            factors[:, :, i] = table[:, x[:, i]].T
        return self.class_prior, factors

    def local_parameters(self, f: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
        prior, factors = self.local_parameters_many(self.schema.check_features(f)[np.newaxis, :])
        return prior, factors[0]


def fit(train: CategoricalDataset, alpha: float) -> NbcModel:
    """
    Fit naive Bayes with Laplace smoothing ``alpha``.

    P(c) = (count(c) + a) / (m + a|C|) and
    P(f_i = v | c) = (count(c, f_i = v) + a) / (count(c) + a|F_i|).
    With ``alpha = 0`` a class absent from ``train`` gets uniform conditionals
    (its prior is zero, so they never affect a joint).

    Raises:
        ValueError: If alpha is negative or the training set is empty
    """
    valid, msg = validate_nonnegative(alpha, "alpha")
    if not valid:
        raise ValueError(msg)
    m = len(train)
    if m == 0:
        raise ValueError("Cannot fit a model on an empty training set")
    schema = train.schema
    class_count = schema.class_count
    class_counts = train.class_counts().astype(np.float64)
    prior = (class_counts + alpha) / (m + alpha * class_count)

    tables = []
    for i, cardinality in enumerate(schema.cardinalities):
        counts = np.zeros((class_count, cardinality))
        np.add.at(counts, (train.labels, train.features[:, i]), 1.0)
        denominators = class_counts[:, np.newaxis] + alpha * cardinality
        with np.errstate(invalid="ignore", divide="ignore"):
            table = (counts + alpha) / denominators
        if alpha == 0:
            table[class_counts == 0.0, :] = 1.0 / cardinality
        tables.append(table)
    return NbcModel(schema, prior, tuple(tables), float(alpha))


def cv_accuracy(train: CategoricalDataset, alpha: float, k: int, seed: int) -> float:
    """Mean validation accuracy over ``k`` folds; instances with degenerate evidence count as wrong."""
    fold_accuracies = []
    for train_idx, val_idx in kfold_indices(len(train), k, seed):
        model = fit(train.subset(train_idx), alpha)
        validation = train.subset(val_idx)
        log_joint = model.log_joint_many(validation.features)
        scoreable = ~np.isneginf(log_joint.max(axis=1))
        correct = (np.argmax(log_joint, axis=1) == validation.labels) & scoreable
        fold_accuracies.append(float(correct.mean()))
    return float(np.mean(fold_accuracies))


def tune_smoothing(
    train: CategoricalDataset, grid: Sequence[float] = DEFAULT_ALPHA_GRID, k: int = 5, seed: int = 0
) -> float:
    """
    Choose the smoothing parameter by k-fold cross-validated accuracy.

    All candidates share the same folds. The best mean accuracy wins and ties
    go to the smaller alpha.

    Raises:
        ValueError: If the grid is empty or holds a negative value, or |train| < k
    """
    valid, msg = validate_grid(grid, 0.0, math.inf, "alpha grid")
    if not valid:
        raise ValueError(msg)
    best_alpha, best_accuracy = None, -1.0
    for alpha in sorted(float(a) for a in grid):
        accuracy = cv_accuracy(train, alpha, k, seed)
        logger.debug("alpha=%s: mean CV accuracy %.4f", alpha, accuracy)
        if accuracy > best_accuracy:
            best_alpha, best_accuracy = alpha, accuracy
    assert best_alpha is not None
    logger.info("Selected alpha=%s (mean CV accuracy %.4f)", best_alpha, best_accuracy)
    return best_alpha


def fit_tuned(
    train: CategoricalDataset, grid: Sequence[float] = DEFAULT_ALPHA_GRID, k: int = 5, seed: int = 0
) -> NbcModel:
    """Tune alpha by cross-validation, then fit on the entire training set."""
    return fit(train, tune_smoothing(train, grid, k, seed))


__all__ = [
    "DegenerateEvidenceError",
    "GenerativeClassifier",
    "NbcModel",
    "fit",
    "cv_accuracy",
    "tune_smoothing",
    "fit_tuned",
]
