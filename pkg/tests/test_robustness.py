"""Test suite for the robustness measures.

Tests verify the closed-form global robustness, the local robustness check
against exhaustive vertex enumeration, the bisection against a fine grid
scan, and the witness models produced for non-robust predictions.
"""
import numpy as np
import pytest

from src.data.dataset import CategoricalDataset, FeatureSchema
from src.evaluation.arc import Direction, arc, order_scores
from src.measures.robustness import (
    ContaminationRadius,
    global_robustness,
    is_robust_local,
    is_robust_local_many,
    joint_gap,
    oracle_witness,
    r_global,
    r_global_many,
    r_local,
    r_local_many,
    r_local_oracle,
    vertex_count,
)
from src.models.naive_bayes import NbcModel, fit

EPSILON_GRID = [0.0, 0.01, 0.03, 0.07, 0.12, 0.2, 0.33, 0.5, 0.8]


@pytest.fixture
def tied_model():
    """Two classes with identical parameters: every prediction is a tie."""
    schema = FeatureSchema(cardinalities=(2, 3), class_count=2)
    return NbcModel(schema, np.array([0.5, 0.5]), (np.full((2, 2), 0.5), np.full((2, 3), 1 / 3)), 1.0)


def _all_instances(model):
    grids = np.meshgrid(*[np.arange(c) for c in model.schema.cardinalities], indexing="ij")
    return np.stack(grids, axis=-1).reshape(-1, model.schema.feature_count)


def _random_small_model(rng):
    """Naive Bayes fit on random data: up to 3 classes, 3 features of up to 3 values, alpha 0.1 or 1."""
    class_count = int(rng.integers(2, 4))
    cardinalities = tuple(int(c) for c in rng.integers(1, 4, size=int(rng.integers(1, 4))))
    size = int(rng.integers(4, 16))
    features = np.column_stack([rng.integers(0, c, size=size) for c in cardinalities])
    data = CategoricalDataset(FeatureSchema(cardinalities, class_count), features, rng.integers(0, class_count, size))
    return fit(data, float(rng.choice([0.1, 1.0])))


def _enumeration_root(model, f, precision=1e-10):
    """Boundary radius of the enumeration check, by bisection on its verdict."""
    if not r_local_oracle(model, f, 0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > precision:
        mid = 0.5 * (lo + hi)
        if r_local_oracle(model, f, mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestGlobalRobustness:
    """Tests for r_glob."""

    def test_hand_computed(self, toy_dataset):
        """Test Δ / (1 + Δ) with Δ = 1/7 - 1/21."""
        model = fit(toy_dataset, 1.0)
        assert np.isclose(r_global(model, [0, 0]), (2 / 21) / (1 + 2 / 21))

    def test_tie_is_zero(self, tied_model):
        """Test that tied top joints give zero robustness."""
        assert r_global(tied_model, [1, 2]) == 0.0

    def test_transform_range_and_monotonicity(self):
        """Test that Δ / (1 + Δ) increases from 0 to 0.5 on [0, 1]."""
        deltas = np.linspace(0, 1, 1000)
        values = global_robustness(deltas)
        assert values[0] == 0.0 and np.isclose(values[-1], 0.5)
        assert np.all(np.diff(values) > 0)

    def test_closed_form_value(self):
        """Test joints (0.3, 0.1): Δ = 0.2 gives 1/6."""
        delta = joint_gap(np.array([[0.3, 0.1]]))
        assert abs(global_robustness(delta)[0] - 1 / 6) < 1e-12

    def test_monotone_transform_keeps_curve(self, random_model_factory):
        """Test that ordering by Δ and by Δ / (1 + Δ) gives the same accuracy-rejection curve."""
        model = random_model_factory(seed=9, class_count=3)
        x = _all_instances(model)
        correct = model.predict_many(x) == np.arange(len(x)) % 3
        by_gap = order_scores(joint_gap(np.exp(model.log_joint_many(x))), Direction.REJECT_LOW_FIRST)
        by_measure = order_scores(r_global_many(model, x), Direction.REJECT_LOW_FIRST)
        assert np.array_equal(arc(by_gap, correct).accuracies, arc(by_measure, correct).accuracies)

    def test_joint_gap(self):
        """Test the gap between the two largest joints."""
        assert np.allclose(joint_gap(np.array([[0.1, 0.4, 0.3]])), [0.1])

    def test_batch_matches_single(self, random_model_factory):
        """Test per-instance and batch values agree exactly."""
        model = random_model_factory(seed=2, class_count=3)
        x = _all_instances(model)
        assert [r_global(model, row) for row in x] == r_global_many(model, x).tolist()


class TestLocalRobustnessCheck:
    """Tests for is_robust_local."""

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_matches_vertex_enumeration(self, seed, random_model_factory):
        """Test the closed-form check against exhaustive enumeration of credal-set vertices."""
        model = random_model_factory(seed=seed, size=30, cardinalities=(2, 3, 2), class_count=3, alpha=0.5)
        for f in _all_instances(model):
            for eps in EPSILON_GRID:
                assert is_robust_local(model, f, eps) == r_local_oracle(model, f, eps), f"f={f.tolist()} eps={eps}"

    def test_matches_enumeration_with_single_value_feature(self):
        """Test agreement when one feature can take a single value only."""
        schema = FeatureSchema(cardinalities=(1, 3), class_count=2)
        model = NbcModel(
            schema,
            np.array([0.4, 0.6]),
            (np.ones((2, 1)), np.array([[0.7, 0.2, 0.1], [0.2, 0.3, 0.5]])),
            1.0,
        )
        for f in _all_instances(model):
            for eps in EPSILON_GRID:
                assert is_robust_local(model, f, eps) == r_local_oracle(model, f, eps)

    def test_matches_vertex_enumeration_on_random_models(self):
        """Test agreement with enumeration over 1000 random small models and the radius grid 0, 0.05, ..., 0.95."""
        rng = np.random.default_rng(2024)
        radii = np.round(np.arange(0.0, 1.0, 0.05), 2)
        for trial in range(1000):
            model = _random_small_model(rng)
            f = np.array([rng.integers(0, c) for c in model.schema.cardinalities])
            for eps in radii:
                expected = r_local_oracle(model, f, float(eps))
                assert is_robust_local(model, f, float(eps)) == expected, f"trial={trial} eps={eps}"

    def test_zero_and_full_contamination(self, toy_dataset, tied_model):
        """Test robustness at the ends of the radius range."""
        model = fit(toy_dataset, 1.0)
        assert is_robust_local(model, [0, 0], 0.0) is True
        assert is_robust_local(model, [0, 0], 1.0) is False
        assert is_robust_local(tied_model, [0, 0], 0.0) is False

    def test_monotone_in_radius(self, random_model_factory):
        """Test that once robustness fails it never returns at larger radii."""
        model = random_model_factory(seed=7)
        x = _all_instances(model)
        radii = np.linspace(0, 1, 41)
        flags = np.column_stack([is_robust_local_many(model, x, eps) for eps in radii])
        for row in flags:
            failing = np.flatnonzero(~row)
            if failing.size:
                assert not row[failing[0]:].any()

    def test_invalid_radius(self, toy_dataset):
        """Test that radii outside [0, 1] are rejected."""
        model = fit(toy_dataset, 1.0)
        with pytest.raises(ValueError):
            is_robust_local(model, [0, 0], 1.5)
        with pytest.raises(ValueError):
            ContaminationRadius(-0.1)
        assert is_robust_local(model, [0, 0], ContaminationRadius(0.01)) is True
        assert is_robust_local(model, [0, 0], ContaminationRadius(np.int64(0))) is True

    def test_enumeration_size_limit(self):
        """Test that oversized schemas are refused by the oracle."""
        schema = FeatureSchema(cardinalities=(10, 10, 10, 10), class_count=2)
        tables = tuple(np.full((2, 10), 0.1) for _ in range(4))
        model = NbcModel(schema, np.array([0.5, 0.5]), tables, 1.0)
        assert vertex_count(model) > 1_000_000
        with pytest.raises(ValueError):
            r_local_oracle(model, [0, 0, 0, 0], 0.1)


class TestLocalRobustness:
    """Tests for r_loc bisection."""

    def test_range(self, random_model_factory):
        """Test that r_loc lies in [0, 1)."""
        model = random_model_factory(seed=4, class_count=3)
        values = r_local_many(model, _all_instances(model))
        assert np.all((values >= 0) & (values < 1))

    def test_tie_is_zero(self, tied_model):
        """Test that a prediction that is not robust at radius 0 scores 0."""
        assert r_local(tied_model, [0, 1]) == 0.0

    @pytest.mark.parametrize("seed", [0, 5])
    def test_matches_grid_scan(self, seed, random_model_factory):
        """Test bisection against the first failing radius of a fine scan."""
        model = random_model_factory(seed=seed, cardinalities=(2, 3), alpha=0.5)
        radii = np.linspace(0, 1, 2001)
        step = radii[1]
        for f in _all_instances(model):
            robust = np.array([is_robust_local(model, f, eps) for eps in radii])
            value = r_local(model, f)
            if not robust[0]:
                assert value == 0.0
                continue
            first_failure = radii[np.argmax(~robust)]
            assert first_failure - step - 1e-6 <= value <= first_failure + 1e-6

    def test_bracket_property(self, random_model_factory):
        """Test robust just below and not robust just above the returned radius."""
        model = random_model_factory(seed=11)
        for f in _all_instances(model):
            value = r_local(model, f, tol=1e-8)
            if value > 1e-6:
                assert is_robust_local(model, f, value - 1e-6)
            assert not is_robust_local(model, f, min(value + 1e-6, 1.0))

    def test_batch_matches_single(self, random_model_factory):
        """Test per-instance and batch values agree exactly."""
        model = random_model_factory(seed=6)
        x = _all_instances(model)
        assert [r_local(model, row) for row in x] == r_local_many(model, x).tolist()

    def test_single_value_feature_is_neutral(self):
        """Test that a feature with one value does not change r_loc."""
        table = np.array([[0.6, 0.3, 0.1], [0.2, 0.3, 0.5]])
        prior = np.array([0.55, 0.45])
        plain = NbcModel(FeatureSchema((3,), 2), prior, (table,), 1.0)
        padded = NbcModel(FeatureSchema((1, 3), 2), prior, (np.ones((2, 1)), table), 1.0)
        for v in range(3):
            assert np.isclose(r_local(plain, [v]), r_local(padded, [0, v]), atol=1e-6)

    def test_invalid_tolerance(self, toy_dataset):
        """Test that a nonpositive tolerance is rejected."""
        with pytest.raises(ValueError):
            r_local(fit(toy_dataset, 1.0), [0, 0], tol=0.0)

    def test_matches_exact_root_on_random_models(self):
        """Test r_loc against a root of the enumeration check located to 1e-10, over 200 random models."""
        rng = np.random.default_rng(77)
        for trial in range(200):
            model = _random_small_model(rng)
            f = np.array([rng.integers(0, c) for c in model.schema.cardinalities])
            root = _enumeration_root(model, f)
            value = r_local(model, f)
            assert abs(value - root) <= 2e-6, f"trial={trial} root={root} value={value}"
            if 2e-6 < value < 1.0 - 2e-6:
                assert is_robust_local(model, f, value - 2e-6)
                assert not is_robust_local(model, f, value + 2e-6)

    def test_failure_below_tolerance_scores_zero(self):
        """Test that a prediction robust at 0 but not at twice the tolerance gets 0."""
        schema = FeatureSchema(cardinalities=(2,), class_count=2)
        model = NbcModel(schema, np.array([0.5, 0.5]), (np.array([[0.5 + 1e-6, 0.5 - 1e-6], [0.5, 0.5]]),), 1.0)
        assert is_robust_local(model, [0], 0.0)
        assert not is_robust_local(model, [0], 2e-3)
        assert r_local(model, [0], tol=1e-3) == 0.0


class TestOracleWitness:
    """Tests for witness models of non-robust predictions."""

    def test_none_when_robust(self, toy_dataset):
        """Test that a robust prediction has no witness."""
        assert oracle_witness(fit(toy_dataset, 1.0), [0, 0], 0.0) is None

    @pytest.mark.parametrize("eps", [0.2, 0.5])
    def test_witness_overturns_prediction(self, eps, random_model_factory):
        """Test that the witness lies in the neighbourhood and a rival at least ties the prediction."""
        model = random_model_factory(seed=3, cardinalities=(2, 3), class_count=3, alpha=0.5)
        checked = 0
        for f in _all_instances(model):
            if is_robust_local(model, f, eps):
                continue
            witness = oracle_witness(model, f, eps)
            assert witness is not None
            c_hat = model.predict(f)
            log_joint = witness.log_joint(f)
            rivals = np.delete(log_joint, c_hat)
            assert rivals.max() >= log_joint[c_hat]
            # every pmf of the witness is an eps-contamination of the original
            assert np.all(witness.class_prior >= (1 - eps) * model.class_prior - 1e-12)
            for original, contaminated in zip(model.conditionals, witness.conditionals):
                assert np.all(contaminated >= (1 - eps) * original - 1e-12)
            checked += 1
        assert checked > 0
