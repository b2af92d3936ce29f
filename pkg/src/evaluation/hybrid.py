"""Hybrid rejection orders from one uncertainty and one robustness measure.

Each instance gets the weighted rank ``h = gamma * n_u + (1 - gamma) * n_r``,
where ``n_u`` and ``n_r`` are its 0-based positions in the two rejection
orders; instances are rejected by increasing ``h``, ties going to the smaller
``n_u`` and then to the smaller index. The weight is picked on training data
(``gamma_train``), biased by ``mu`` (chosen by cross-validation) and deployed
as ``gamma_star``. ``gamma_opt``, the best weight on the test set itself, is a
reference value only.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from src.data.dataset import CategoricalDataset
from src.data.sampling import derive_seed, kfold_indices
from src.evaluation.arc import Direction, InstanceOrdering, arc, order_scores
from src.measures.catalog import Measure
from src.measures.scoring import measure_matrix
from src.measures.uncertainty import DEFAULT_ENSEMBLE_SIZE, fit_ensemble
from src.models.naive_bayes import fit
from src.utils.validation import validate_grid, validate_probability, validate_signed_unit

logger = logging.getLogger(__name__)

DEFAULT_GAMMA_GRID = np.linspace(0.0, 1.0, 101)
DEFAULT_MU_GRID = np.linspace(-1.0, 1.0, 21)
GAMMA_PREFERENCE = 0.5
MU_PREFERENCE = 0.0
ARGMAX_TOLERANCE = 1e-12
MIN_HELD_OUT = 2
WEIGHT_DENOMINATOR_LIMIT = 1_000_000


def _check_unit(value: float, name: str) -> float:
    valid, msg = validate_probability(value, name)
    if not valid:
        raise ValueError(msg)
    return float(value)


def _check_grid(grid: Sequence[float], low: float, high: float, name: str) -> np.ndarray:
    values = np.asarray(list(grid), dtype=np.float64)
    valid, msg = validate_grid(values.tolist(), low, high, name)
    if not valid:
        raise ValueError(msg)
    return values


def gamma_star(gamma_train: float, mu: float) -> float:
    """
    Bias the trained weight toward uncertainty (mu > 0) or robustness (mu < 0).

    ``(1 - mu) * gamma_train + mu`` for positive mu, ``(1 + mu) * gamma_train`` otherwise.

    Raises:
        ValueError: If gamma_train is outside [0, 1] or mu outside [-1, 1]
    """
    gamma_train = _check_unit(gamma_train, "gamma_train")
    valid, msg = validate_signed_unit(mu, "mu")
    if not valid:
        raise ValueError(msg)
    if mu > 0:
        return (1.0 - mu) * gamma_train + mu
    return (1.0 + mu) * gamma_train


@dataclass(frozen=True, slots=True)
class HybridWeights:
    gamma_train: float
    mu: float
    gamma_star: float
    gamma_opt: Optional[float] = None

    @classmethod
    def from_training(cls, gamma_train: float, mu: float, gamma_opt: Optional[float] = None) -> "HybridWeights":
        return cls(gamma_train, mu, gamma_star(gamma_train, mu), gamma_opt)

    def __post_init__(self) -> None:
        _check_unit(self.gamma_train, "gamma_train")
        _check_unit(self.gamma_star, "gamma_star")
        if self.gamma_opt is not None:
            _check_unit(self.gamma_opt, "gamma_opt")
        if self.gamma_star != gamma_star(self.gamma_train, self.mu):
            raise ValueError("gamma_star does not match gamma_train and mu")


def hybrid_order(order_u: InstanceOrdering, order_r: InstanceOrdering, gamma: float) -> InstanceOrdering:
    """
    Combine two rejection orders by weighted rank position.

    Raises:
        ValueError: If the orders cover different numbers of instances or gamma is outside [0, 1]
    """
    gamma = _check_unit(gamma, "gamma")
    if len(order_u) != len(order_r):
        raise ValueError(f"Orderings cover {len(order_u)} and {len(order_r)} instances")
    n_u = order_u.positions().astype(np.int64)
    n_r = order_r.positions().astype(np.int64)
    # h scaled by the denominator of gamma; integer keys make equal weighted ranks tie exactly
    weight = Fraction(gamma).limit_denominator(WEIGHT_DENOMINATOR_LIMIT)
    h = weight.numerator * n_u + (weight.denominator - weight.numerator) * n_r
    order = np.lexsort((np.arange(len(order_u)), n_u, h))
    return InstanceOrdering(order, f"hybrid(gamma={gamma:g}; ties by uncertainty position, then index)")


def gamma_profile(
    order_u: InstanceOrdering, order_r: InstanceOrdering, correctness: Sequence[bool], grid: Sequence[float]
) -> np.ndarray:
    """AU-ARC of the hybrid order at every grid weight."""
    return np.array([arc(hybrid_order(order_u, order_r, g), correctness).au_arc for g in grid])


def grid_argmax(values: np.ndarray, grid: np.ndarray, preferred: float) -> float:
    """Grid point with the highest value; near-ties go to the point nearest ``preferred``, then the smaller one."""
    best = np.max(values)
    candidates = grid[np.isclose(values, best, rtol=0.0, atol=ARGMAX_TOLERANCE)]
    distance = np.abs(candidates - preferred)
    closest = candidates[np.isclose(distance, distance.min(), rtol=0.0, atol=ARGMAX_TOLERANCE)]
    return float(closest.min())


def _orderings(
    scores_u: Sequence[float], scores_r: Sequence[float], direction_u: Direction, direction_r: Direction
) -> Tuple[InstanceOrdering, InstanceOrdering]:
    return order_scores(scores_u, direction_u), order_scores(scores_r, direction_r)


def tune_gamma_train(
    scores_u: Sequence[float],
    scores_r: Sequence[float],
    correctness: Sequence[bool],
    grid: Sequence[float] = DEFAULT_GAMMA_GRID,
    *,
    direction_u: Direction = Direction.REJECT_HIGH_FIRST,
    direction_r: Direction = Direction.REJECT_LOW_FIRST,
) -> float:
    """
    Weight with the best training-set AU-ARC (near-ties toward 0.5).

    Args:
        scores_u: Uncertainty values of the training instances
        scores_r: Robustness values of the same instances
        correctness: Whether each training instance is classified correctly
        grid: Candidate weights in [0, 1]
        direction_u: Rejection direction of the uncertainty measure
        direction_r: Rejection direction of the robustness measure

    Raises:
        ValueError: If the grid is empty or leaves [0, 1]
    """
    weights = _check_grid(grid, 0.0, 1.0, "gamma grid")
    order_u, order_r = _orderings(scores_u, scores_r, direction_u, direction_r)
    profile = gamma_profile(order_u, order_r, correctness, weights)
    return grid_argmax(profile, weights, GAMMA_PREFERENCE)


def gamma_opt(
    scores_u: Sequence[float],
    scores_r: Sequence[float],
    correctness: Sequence[bool],
    grid: Sequence[float] = DEFAULT_GAMMA_GRID,
    *,
    direction_u: Direction = Direction.REJECT_HIGH_FIRST,
    direction_r: Direction = Direction.REJECT_LOW_FIRST,
) -> float:
    """Best weight on test data: the same search as ``tune_gamma_train``, for reference only."""
    return tune_gamma_train(scores_u, scores_r, correctness, grid, direction_u=direction_u, direction_r=direction_r)


def hybrid_au_arc(
    scores_u: Sequence[float],
    scores_r: Sequence[float],
    correctness: Sequence[bool],
    gamma: float,
    *,
    direction_u: Direction = Direction.REJECT_HIGH_FIRST,
    direction_r: Direction = Direction.REJECT_LOW_FIRST,
) -> float:
    order_u, order_r = _orderings(scores_u, scores_r, direction_u, direction_r)
    return arc(hybrid_order(order_u, order_r, gamma), correctness).au_arc


def tune_mu(
    train: CategoricalDataset,
    uncertainty: Measure,
    robustness: Measure,
    mu_grid: Sequence[float] = DEFAULT_MU_GRID,
    k: int = 5,
    seed: int = 0,
    alpha: float = 1.0,
    *,
    gamma_grid: Sequence[float] = DEFAULT_GAMMA_GRID,
    ensemble_size: int = DEFAULT_ENSEMBLE_SIZE,
) -> float:
    """
    Choose the bias ``mu`` by k-fold cross-validation on the training set.

    In every fold a model (and, for ensemble measures, a fresh ensemble) is fit
    on the fold's training part, ``gamma_train`` is tuned on that part, and each
    candidate mu is scored by the held-out AU-ARC at ``gamma_star(gamma_train, mu)``.
    The best mean held-out AU-ARC wins; near-ties go toward mu = 0.

    Raises:
        ValueError: If the grid is empty, |train| < k or a held-out part has fewer than 2 instances
    """
    mus = _check_grid(mu_grid, -1.0, 1.0, "mu grid")
    weights = _check_grid(gamma_grid, 0.0, 1.0, "gamma grid")
    pair = [uncertainty, robustness]
    needs_ensemble = any(m.needs_ensemble for m in pair)
    totals = np.zeros(mus.shape[0])
    folds = kfold_indices(len(train), k, seed)
    for fold_index, (train_idx, held_idx) in enumerate(folds):
        if len(held_idx) < MIN_HELD_OUT:
            raise ValueError(f"Fold {fold_index} holds {len(held_idx)} instance(s); too small to score")
        fold_train = train.subset(train_idx)
        held_out = train.subset(held_idx)
        model = fit(fold_train, alpha)
        ensemble = (
            fit_ensemble(fold_train, alpha, ensemble_size, derive_seed(seed, "fold", fold_index))
            if needs_ensemble
            else None
        )

        train_scores = measure_matrix(model, ensemble, fold_train.features, pair)
        train_correct = model.predict_many(fold_train.features) == fold_train.labels
        fold_gamma = tune_gamma_train(
            train_scores[uncertainty],
            train_scores[robustness],
            train_correct,
            weights,
            direction_u=uncertainty.direction,
            direction_r=robustness.direction,
        )

        held_scores = measure_matrix(model, ensemble, held_out.features, pair)
        held_correct = model.predict_many(held_out.features) == held_out.labels
        order_u, order_r = _orderings(
            held_scores[uncertainty], held_scores[robustness], uncertainty.direction, robustness.direction
        )
        for j, mu in enumerate(mus):
            totals[j] += arc(hybrid_order(order_u, order_r, gamma_star(fold_gamma, float(mu))), held_correct).au_arc
        logger.debug("Fold %d: gamma_train=%.2f", fold_index, fold_gamma)

    mean_au_arc = totals / len(folds)
    chosen = grid_argmax(mean_au_arc, mus, MU_PREFERENCE)
    logger.info(
        "Selected mu=%.2f for (%s, %s) (mean held-out AU-ARC %.4f)",
        chosen,
        uncertainty.value,
        robustness.value,
        mean_au_arc.max(),
    )
    return chosen


__all__ = [
    "DEFAULT_GAMMA_GRID",
    "DEFAULT_MU_GRID",
    "HybridWeights",
    "gamma_star",
    "hybrid_order",
    "gamma_profile",
    "grid_argmax",
    "tune_gamma_train",
    "gamma_opt",
    "hybrid_au_arc",
    "tune_mu",
]
