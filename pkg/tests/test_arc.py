"""Test suite for rejection orderings and accuracy-rejection curves.

Tests verify score ordering with index tie-breaks, hand-computed curves,
AU-ARC, pointwise curve averaging and the optimal ordering.
"""
import itertools

import numpy as np
import pytest

from src.evaluation.arc import (
    ArcCurve,
    Direction,
    InstanceOrdering,
    ScoredInstance,
    arc,
    au_arc,
    mean_arc,
    optimal_ordering,
    order_instances,
    order_scores,
)

SCORES = [0.1, 0.9, 0.5, 0.9]
CORRECT = [True, False, True, False]


class TestOrdering:
    """Tests for rejection orders."""

    def test_high_first_ties_by_index(self):
        """Test that equal scores keep index order."""
        assert order_scores(SCORES, Direction.REJECT_HIGH_FIRST).order.tolist() == [1, 3, 2, 0]

    def test_low_first(self):
        """Test ordering when low scores are rejected first."""
        assert order_scores(SCORES, Direction.REJECT_LOW_FIRST).order.tolist() == [0, 2, 1, 3]

    def test_all_tied_is_index_order(self):
        """Test that constant scores give the identity order."""
        assert order_scores([0.3] * 5, Direction.REJECT_HIGH_FIRST).order.tolist() == [0, 1, 2, 3, 4]

    def test_positions_invert_order(self):
        """Test that positions are the inverse permutation."""
        ordering = order_scores(SCORES, Direction.REJECT_HIGH_FIRST)
        assert ordering.positions().tolist() == [3, 0, 2, 1]

    def test_invalid_scores(self):
        """Test that empty or non-finite scores are rejected."""
        with pytest.raises(ValueError):
            order_scores([], Direction.REJECT_LOW_FIRST)
        with pytest.raises(ValueError):
            order_scores([0.1, np.nan], Direction.REJECT_LOW_FIRST)

    def test_ordering_must_be_permutation(self):
        """Test that InstanceOrdering validates its contents."""
        with pytest.raises(ValueError):
            InstanceOrdering(np.array([0, 0, 1]))

    def test_order_instances_matches_scores(self):
        """Test that scored records order like the raw score vector."""
        scored = [ScoredInstance(i, s, c) for i, (s, c) in reversed(list(enumerate(zip(SCORES, CORRECT))))]
        ordering = order_instances(scored, Direction.REJECT_HIGH_FIRST)
        assert ordering.equals(order_scores(SCORES, Direction.REJECT_HIGH_FIRST))

    def test_order_instances_needs_complete_indices(self):
        """Test that gaps in the record indices are rejected."""
        with pytest.raises(ValueError):
            order_instances([ScoredInstance(0, 0.1, True), ScoredInstance(2, 0.2, False)], Direction.REJECT_LOW_FIRST)


class TestArc:
    """Tests for curves and AU-ARC."""

    def test_hand_computed_curve(self):
        """Test accuracies after rejecting 0 .. n-1 instances."""
        curve = arc(order_scores(SCORES, Direction.REJECT_HIGH_FIRST), CORRECT)
        assert np.allclose(curve.accuracies, [0.5, 2 / 3, 1.0, 1.0])
        assert np.isclose(curve.au_arc, (0.5 + 2 / 3 + 1.0 + 1.0) / 4)

    def test_first_point_is_plain_accuracy(self):
        """Test that rejecting nothing gives the overall accuracy."""
        rng = np.random.default_rng(0)
        correct = rng.random(30) < 0.7
        curve = arc(order_scores(rng.random(30), Direction.REJECT_LOW_FIRST), correct)
        assert np.isclose(curve.accuracies[0], correct.mean())
        assert len(curve) == 30

    def test_length_mismatch(self):
        """Test that ordering and correctness must cover the same instances."""
        with pytest.raises(ValueError):
            arc(order_scores(SCORES, Direction.REJECT_LOW_FIRST), CORRECT[:3])

    def test_au_arc_shortcut(self):
        """Test that au_arc equals the curve mean."""
        ordering = order_scores(SCORES, Direction.REJECT_LOW_FIRST)
        assert au_arc(ordering, CORRECT) == arc(ordering, CORRECT).au_arc

    def test_optimal_ordering_dominates(self):
        """Test that rejecting errors first is at least as good as any other order at every point."""
        rng = np.random.default_rng(3)
        correct = rng.random(25) < 0.6
        best = arc(optimal_ordering(correct), correct)
        assert optimal_ordering(CORRECT).order.tolist() == [1, 3, 0, 2]
        for _ in range(20):
            other = arc(InstanceOrdering(rng.permutation(25)), correct)
            assert np.all(best.accuracies >= other.accuracies - 1e-12)
            assert best.au_arc >= other.au_arc

    def test_optimal_ordering_dominates_exhaustively(self):
        """Test pointwise dominance over every permutation of six instances."""
        correct = np.array([True, False, True, True, False, True])
        best = arc(optimal_ordering(correct), correct).accuracies
        for permutation in itertools.permutations(range(6)):
            assert np.all(best >= arc(InstanceOrdering(np.array(permutation)), correct).accuracies - 1e-12)

    def test_to_frame(self):
        """Test the tabular form of a curve."""
        frame = ArcCurve.from_accuracies([0.5, 0.6, 0.8, 1.0]).to_frame()
        assert list(frame.columns) == ["rejection_count", "rejection_rate", "accuracy"]
        assert frame["rejection_rate"].tolist() == [0.0, 0.25, 0.5, 0.75]

    def test_empty_curve_rejected(self):
        """Test that a curve needs at least one point."""
        with pytest.raises(ValueError):
            ArcCurve.from_accuracies([])


class TestMeanArc:
    """Tests for pointwise averaging."""

    def test_pointwise_mean(self):
        """Test the mean of two curves and its AU-ARC."""
        curve = mean_arc([ArcCurve.from_accuracies([1.0, 0.5]), ArcCurve.from_accuracies([0.0, 0.5])])
        assert curve.accuracies.tolist() == [0.5, 0.5]
        assert curve.au_arc == 0.5

    def test_length_mismatch(self):
        """Test that curves of different lengths cannot be averaged."""
        with pytest.raises(ValueError):
            mean_arc([ArcCurve.from_accuracies([1.0]), ArcCurve.from_accuracies([1.0, 0.5])])
        with pytest.raises(ValueError):
            mean_arc([])
