"""Rejection orderings, accuracy-rejection curves and AU-ARC.

Instances are rejected one at a time, least reliable first. Entry ``k`` of a
curve is the accuracy on the ``n - k`` instances that remain after rejecting
``k`` of them (``k = 0 .. n - 1``); the empty remainder is not a point of the
curve. AU-ARC is the plain mean of the entries.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)


class Direction(Enum):
    """Which end of a score scale is rejected first."""

    REJECT_HIGH_FIRST = "reject-high-first"
    REJECT_LOW_FIRST = "reject-low-first"


TIE_BREAK_INDEX = "instance index ascending"


@dataclass(frozen=True, slots=True)
class ScoredInstance:
    index: int
    score: float
    correct: bool


@dataclass(frozen=True, slots=True, eq=False)
class InstanceOrdering:
    """A rejection order: ``order[k]`` is the instance rejected at step ``k``."""

    order: np.ndarray
    provenance: str = ""

    def __post_init__(self) -> None:
        order = np.array(self.order, dtype=np.int64, copy=True).reshape(-1)
        if not np.array_equal(np.sort(order), np.arange(order.shape[0])):
            raise ValueError("Ordering must be a permutation of 0 .. n-1")
        order.setflags(write=False)
        object.__setattr__(self, "order", order)

    def __len__(self) -> int:
        return int(self.order.shape[0])

    def positions(self) -> np.ndarray:
        """0-based rejection position of every instance (the inverse permutation)."""
        positions = np.empty_like(self.order)
        positions[self.order] = np.arange(len(self))
        return positions

    def equals(self, other: "InstanceOrdering") -> bool:
        return np.array_equal(self.order, other.order)


@dataclass(frozen=True, slots=True, eq=False)
class ArcCurve:
    accuracies: np.ndarray
    au_arc: float

    @classmethod
    def from_accuracies(cls, accuracies: Sequence[float]) -> "ArcCurve":
        values = np.array(accuracies, dtype=np.float64, copy=True).reshape(-1)
        if values.size == 0:
            raise ValueError("An accuracy-rejection curve needs at least one point")
        values.setflags(write=False)
        return cls(values, float(values.mean()))

    def __len__(self) -> int:
        return int(self.accuracies.shape[0])

    def to_frame(self) -> pd.DataFrame:
        """Columns ``rejection_count``, ``rejection_rate`` and ``accuracy``."""
        n = len(self)
        counts = np.arange(n)
        return pd.DataFrame({"rejection_count": counts, "rejection_rate": counts / n, "accuracy": self.accuracies})


def order_scores(scores: Sequence[float], direction: Direction, provenance: str = "") -> InstanceOrdering:
    """
    Stable rejection order of raw scores.

    Args:
        scores: One finite score per instance
        direction: Whether high or low scores are rejected first
        provenance: Free-text label stored on the ordering

    Raises:
        ValueError: If scores are empty or contain a non-finite value
    """
    values = np.asarray(scores, dtype=np.float64).reshape(-1)
    if values.size == 0:
        raise ValueError("Cannot order an empty score list")
    if not np.all(np.isfinite(values)):
        raise ValueError("Scores must be finite")
    keys = -values if direction is Direction.REJECT_HIGH_FIRST else values
    order = np.lexsort((np.arange(values.size), keys))
    label = provenance or f"{direction.value}, ties by {TIE_BREAK_INDEX}"
    return InstanceOrdering(order, label)


def order_instances(
    scored: Sequence[ScoredInstance], direction: Direction, provenance: str = ""
) -> InstanceOrdering:
    """Order ``ScoredInstance`` records; their indices must be exactly ``0 .. n-1``."""
    if not scored:
        raise ValueError("Cannot order an empty score list")
    indices = np.array([s.index for s in scored], dtype=np.int64)
    if not np.array_equal(np.sort(indices), np.arange(len(scored))):
        raise ValueError("ScoredInstance indices must cover 0 .. n-1 exactly once")
    scores = np.empty(len(scored))
    scores[indices] = [s.score for s in scored]
    return order_scores(scores, direction, provenance)


def arc(ordering: InstanceOrdering, correctness: Sequence[bool]) -> ArcCurve:
    """
    Accuracy-rejection curve of an ordering.

    Raises:
        ValueError: If the ordering and the correctness vector differ in length
    """
    correct = np.asarray(correctness, dtype=bool).reshape(-1)
    n = len(ordering)
    if correct.shape[0] != n:
        raise ValueError(f"Ordering covers {n} instances but correctness has {correct.shape[0]}")
    in_rejection_order = correct[ordering.order].astype(np.int64)
    # correct counts among the last n-k instances, for k = 0 .. n-1
    remaining_correct = np.cumsum(in_rejection_order[::-1])[::-1]
    remaining = np.arange(n, 0, -1)
    return ArcCurve.from_accuracies(remaining_correct / remaining)


def au_arc(ordering: InstanceOrdering, correctness: Sequence[bool]) -> float:
    return arc(ordering, correctness).au_arc


def mean_arc(curves: Sequence[ArcCurve]) -> ArcCurve:
    """
    Pointwise mean of equal-length curves.

    Raises:
        ValueError: If no curves are given or their lengths differ
    """
    if not curves:
        raise ValueError("mean_arc needs at least one curve")
    lengths = {len(c) for c in curves}
    if len(lengths) != 1:
        raise ValueError(f"Curves differ in length: {sorted(lengths)}")
    return ArcCurve.from_accuracies(np.mean(np.stack([c.accuracies for c in curves]), axis=0))


def optimal_ordering(correctness: Sequence[bool]) -> InstanceOrdering:
    """Reject every misclassified instance first (ties by index): the best achievable curve."""
    correct = np.asarray(correctness, dtype=bool).reshape(-1)
    return order_scores(correct.astype(np.float64), Direction.REJECT_LOW_FIRST, "optimal")


__all__ = [
    "Direction",
    "ScoredInstance",
    "InstanceOrdering",
    "ArcCurve",
    "order_scores",
    "order_instances",
    "arc",
    "au_arc",
    "mean_arc",
    "optimal_ordering",
]
