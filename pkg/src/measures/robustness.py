"""
Robustness measures: global (closed form on the joint) and local (ε-contamination
of the naive Bayes local parameters).

Local neighbourhood
-------------------
Every local pmf of the model (the class prior and, for each class and feature,
the conditional pmf of that feature) is replaced independently by
``(1 - eps) * p + eps * q`` for an arbitrary pmf ``q``. The prediction ``c_hat``
is robust at radius ``eps`` when for every rival ``c'`` the worst case still
strictly prefers ``c_hat``::

    (1-eps) P(c_hat) * prod_i lo_i(c_hat)  >  [(1-eps) P(c') + eps] * prod_i [(1-eps) P(f_i|c') + eps]

with ``lo_i(c) = (1-eps) P(f_i|c)``. The prior is shared by both sides; its
worst case puts all contamination mass on ``c'``, which leaves ``c_hat`` at
its lower envelope. The conditional pmfs of ``c_hat`` and ``c'`` are distinct,
so their extremes are reached simultaneously. A feature with a single value
has a point-mass pmf that no contamination can move, so there both envelopes
equal 1.

Both sides are evaluated as sorted sums of logs. The left side decreases and
the right side increases with ``eps``, which makes the robust radius well
defined and bisection valid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from src.models.naive_bayes import GenerativeClassifier, NbcModel
from src.utils.validation import validate_probability

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-6
DEFAULT_MAX_ITER = 60
MAX_VERTEX_COMBINATIONS = 1_000_000


@dataclass(frozen=True, slots=True)
class ContaminationRadius:
    """The shared ε applied to every local pmf."""

    epsilon: float

    def __post_init__(self) -> None:
        valid, msg = validate_probability(self.epsilon, "epsilon")
        if not valid:
            raise ValueError(msg)

    def __float__(self) -> float:
        return float(self.epsilon)


Radius = Union[float, ContaminationRadius]


def _epsilon(value: Radius) -> float:
    return float(value) if isinstance(value, ContaminationRadius) else float(ContaminationRadius(value))


def global_robustness(delta: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Δ / (1 + Δ): strictly increasing on [0, 1], from 0 to 0.5."""
    return delta / (1.0 + delta)


def joint_gap(joints: np.ndarray) -> np.ndarray:
    """Difference between the largest and second-largest joint along the last axis."""
    top_two = np.sort(np.asarray(joints, dtype=np.float64), axis=-1)[..., -2:]
    return top_two[..., 1] - top_two[..., 0]


def r_global_many(model: GenerativeClassifier, features: np.ndarray) -> np.ndarray:
    """Global robustness per instance from the exact joint probabilities."""
    x = np.asarray(features, dtype=np.int64)
    return global_robustness(joint_gap(np.exp(model.log_joint_many(x))))


def r_global(model: GenerativeClassifier, f: Sequence[int]) -> float:
    """
    Largest contamination of the full joint that preserves the prediction.

    Returns Δ / (1 + Δ) where Δ is the joint probability of the predicted class
    minus the largest joint of any other class; 0 exactly when the top joints tie.
    """
    x = model.schema.check_features(f)[np.newaxis, :]
    return float(r_global_many(model, x)[0])


def _sorted_log_sum(factors: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        logs = np.log(factors)
    return np.sort(logs, axis=-1).sum(axis=-1)


def _dominance_sides(
    prior: np.ndarray, factors: np.ndarray, singleton: np.ndarray, c_hat: np.ndarray, eps: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Log LHS per instance ``(m,)`` and log RHS per instance and class ``(m, C)``.

    ``factors`` has shape ``(m, C, n)``; ``eps`` has shape ``(m,)``.
    """
    m = factors.shape[0]
    rows = np.arange(m)
    keep = (1.0 - eps)[:, np.newaxis]
    lhs_prior = keep[:, 0] * prior[c_hat]
    lhs_features = keep * factors[rows, c_hat, :] + eps[:, np.newaxis] * singleton
    lhs = _sorted_log_sum(np.concatenate([lhs_prior[:, np.newaxis], lhs_features], axis=1))

    keep3 = keep[:, :, np.newaxis]
    rhs_prior = keep * prior[np.newaxis, :] + eps[:, np.newaxis]
    rhs_features = keep3 * factors + eps[:, np.newaxis, np.newaxis]
    rhs = _sorted_log_sum(np.concatenate([rhs_prior[:, :, np.newaxis], rhs_features], axis=2))
    return lhs, rhs


def _robust_at(
    prior: np.ndarray, factors: np.ndarray, singleton: np.ndarray, c_hat: np.ndarray, eps: np.ndarray
) -> np.ndarray:
    lhs, rhs = _dominance_sides(prior, factors, singleton, c_hat, eps)
    rhs = rhs.copy()
    rhs[np.arange(rhs.shape[0]), c_hat] = -np.inf
    return lhs > rhs.max(axis=1)


def _local_inputs(
    model: NbcModel, features: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    x = np.asarray(features, dtype=np.int64)
    c_hat = model.predict_many(x)
    prior, factors = model.local_parameters_many(x)
    singleton = (np.asarray(model.schema.cardinalities) == 1).astype(np.float64)
    return prior, factors, singleton, c_hat


def is_robust_local_many(model: NbcModel, features: np.ndarray, epsilon: Radius) -> np.ndarray:
    """Vectorized ``is_robust_local`` for a feature matrix and one shared radius."""
    eps = _epsilon(epsilon)
    prior, factors, singleton, c_hat = _local_inputs(model, features)
    return _robust_at(prior, factors, singleton, c_hat, np.full(factors.shape[0], eps))


def is_robust_local(model: NbcModel, f: Sequence[int], epsilon: Radius) -> bool:
    """
    Whether the prediction survives ε-contamination of every local parameter.

    Raises:
        ValueError: If epsilon is outside [0, 1] or f is out of range
    """
    x = model.schema.check_features(f)[np.newaxis, :]
    return bool(is_robust_local_many(model, x, epsilon)[0])


def r_local_many(
    model: NbcModel, features: np.ndarray, tol: float = DEFAULT_TOLERANCE, max_iter: int = DEFAULT_MAX_ITER
) -> np.ndarray:
    """
    Local robustness per instance by simultaneous bisection on [0, 1].

    Instances not robust at radius 0 (tied or degenerate top joints) or already
    failing at ``2 * tol`` get 0.
    Otherwise the bracket ``[lo, hi]`` keeps ``lo`` robust and ``hi`` not robust
    (full contamination is never robust) and is halved until it is at most
    ``tol`` wide or ``max_iter`` halvings were made; the midpoint is returned.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    prior, factors, singleton, c_hat = _local_inputs(model, features)
    m = factors.shape[0]
    lo = np.zeros(m)
    hi = np.ones(m)
    robust_at_zero = _robust_at(prior, factors, singleton, c_hat, lo)
    robust_at_floor = _robust_at(prior, factors, singleton, c_hat, np.full(m, min(2.0 * tol, 1.0)))
    for _ in range(max_iter):
        if not np.any(hi - lo > tol):
            break
        mid = 0.5 * (lo + hi)
        robust = _robust_at(prior, factors, singleton, c_hat, mid)
        lo = np.where(robust, mid, lo)
        hi = np.where(robust, hi, mid)
    return np.where(robust_at_zero & robust_at_floor, 0.5 * (lo + hi), 0.0)


def r_local(
    model: NbcModel, f: Sequence[int], tol: float = DEFAULT_TOLERANCE, max_iter: int = DEFAULT_MAX_ITER
) -> float:
    """Largest shared ε at which the prediction is locally robust, to within ``tol``."""
    x = model.schema.check_features(f)[np.newaxis, :]
    return float(r_local_many(model, x, tol, max_iter)[0])


def _vertex_grid(cardinalities: Sequence[int]) -> np.ndarray:
    """All combinations of one vertex per feature, shape ``(prod(cardinalities), n)``."""
    if not cardinalities:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(card) for card in cardinalities], indexing="ij")
    return np.stack(grids, axis=-1).reshape(-1, len(cardinalities))


def vertex_count(model: NbcModel) -> int:
    """Prior vertices times the feature-vertex combinations of two compared classes."""
    per_class = int(np.prod(model.schema.cardinalities, dtype=np.float64))
    return model.schema.class_count * per_class * per_class


@dataclass(frozen=True, slots=True)
class _Extreme:
    rival: int
    prior_vertex: int
    predicted_vertices: np.ndarray
    rival_vertices: np.ndarray
    margin: float


def _enumerate_extremes(model: NbcModel, f: Sequence[int], eps: float) -> Tuple[int, Optional[_Extreme]]:
    """Scan every vertex combination; return ``c_hat`` and the least favourable one."""
    count = vertex_count(model)
    if count > MAX_VERTEX_COMBINATIONS:
        raise ValueError(f"Schema too large for vertex enumeration: {count} > {MAX_VERTEX_COMBINATIONS} combinations")
    x = model.schema.check_features(f)
    c_hat = model.predict(x)
    cardinalities = model.schema.cardinalities
    combos = _vertex_grid(cardinalities)
    observed = combos == x[np.newaxis, :]
    prior = model.class_prior
    _, factors = model.local_parameters(x)

    worst: Optional[_Extreme] = None
    for rival in range(model.schema.class_count):
        if rival == c_hat:
            continue
        for k in range(model.schema.class_count):
            prior_vertex = (1.0 - eps) * prior + eps * (np.arange(prior.shape[0]) == k)
            # contaminated P(f_i | c) at each vertex: mass eps lands on f_i or elsewhere
            lhs_factors = (1.0 - eps) * factors[c_hat][np.newaxis, :] + eps * observed
            rhs_factors = (1.0 - eps) * factors[rival][np.newaxis, :] + eps * observed
            lhs_all = _sorted_log_sum(np.column_stack([np.full(len(combos), prior_vertex[c_hat]), lhs_factors]))
            rhs_all = _sorted_log_sum(np.column_stack([np.full(len(combos), prior_vertex[rival]), rhs_factors]))
            lhs_index = int(np.argmin(lhs_all))
            rhs_index = int(np.argmax(rhs_all))
            with np.errstate(invalid="ignore"):
                margin = float(lhs_all[lhs_index] - rhs_all[rhs_index])
            if np.isnan(margin):
                margin = -np.inf
            if worst is None or margin < worst.margin:
                worst = _Extreme(rival, k, combos[lhs_index], combos[rhs_index], margin)
    return c_hat, worst


def r_local_oracle(model: NbcModel, f: Sequence[int], epsilon: Radius) -> bool:
    """
    Exhaustive check of local robustness over the extreme points of the credal sets.

    Every extreme point puts the whole contamination mass on one outcome of its
    pmf. For each rival class and each prior vertex, every combination of
    feature vertices is evaluated; the prediction is robust iff the smallest
    predicted-class joint strictly exceeds the largest rival joint throughout.

    Raises:
        ValueError: If epsilon is outside [0, 1] or the schema has more than
            ``MAX_VERTEX_COMBINATIONS`` vertex combinations
    """
    eps = _epsilon(epsilon)
    _, worst = _enumerate_extremes(model, f, eps)
    return worst is None or worst.margin > 0.0


def oracle_witness(model: NbcModel, f: Sequence[int], epsilon: Radius) -> Optional[NbcModel]:
    """
    A model inside the ε-neighbourhood under which a rival class is at least as
    probable as the prediction, or None when the prediction is robust.

    The witness is the least favourable vertex found by ``r_local_oracle``;
    classes other than the prediction and the rival put their contamination
    mass on an unobserved value where one exists.
    """
    eps = _epsilon(epsilon)
    c_hat, worst = _enumerate_extremes(model, f, eps)
    if worst is None or worst.margin > 0.0:
        return None
    x = model.schema.check_features(f)
    class_count = model.schema.class_count
    prior = (1.0 - eps) * model.class_prior + eps * (np.arange(class_count) == worst.prior_vertex)
    tables = []
    for i, table in enumerate(model.conditionals):
        cardinality = model.schema.cardinalities[i]
        targets = np.where(cardinality > 1, (x[i] + 1) % cardinality, x[i]) * np.ones(class_count, dtype=np.int64)
        targets[c_hat] = worst.predicted_vertices[i]
        targets[worst.rival] = worst.rival_vertices[i]
        mass = np.zeros_like(table)
        mass[np.arange(class_count), targets] = 1.0
        tables.append((1.0 - eps) * table + eps * mass)
    return NbcModel(model.schema, prior, tuple(tables), model.smoothing)


__all__ = [
    "ContaminationRadius",
    "global_robustness",
    "joint_gap",
    "r_global",
    "r_global_many",
    "is_robust_local",
    "is_robust_local_many",
    "r_local",
    "r_local_many",
    "vertex_count",
    "r_local_oracle",
    "oracle_witness",
]
