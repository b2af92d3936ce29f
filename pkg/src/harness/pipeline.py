"""Experiment configuration, result containers and the per-split scoring pipeline.

One split is processed as: tune alpha by cross-validation on the training
part, fit the model on the whole training part, fit the bootstrap ensemble,
score every test instance on every measure, and build one accuracy-rejection
curve per measure.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.data.dataset import CategoricalDataset, LoadedDataset, SplitSpec
from src.data.sampling import derive_seed, split, split_with_test
from src.evaluation.arc import ArcCurve, arc, order_scores
from src.measures.catalog import ALL_MEASURES, Measure, MeasureKind, parse_measures
from src.measures.scoring import score_dataset
from src.measures.uncertainty import Ensemble, fit_ensemble
from src.models.naive_bayes import NbcModel, fit, tune_smoothing
from src.utils.config import (
    get_harness_config,
    get_hybrid_config,
    get_model_config,
    validate_configuration,
)

logger = logging.getLogger(__name__)


class Setting(Enum):
    STANDARD = "standard"
    SHIFT = "shift"
    HYBRID = "hybrid"


@dataclass(slots=True)
class ExperimentConfig:
    """Everything a run depends on besides the dataset files."""

    datasets: List[str]
    setting: Setting = Setting.STANDARD
    seed: int = 0
    out: Path = Path("results")
    reps: int = 7
    sizes: Tuple[int, ...] = (50, 100, 200)
    betas: Tuple[float, ...] = (0.0, 0.10, 0.20)
    measures: Tuple[Measure, ...] = ALL_MEASURES
    alpha_grid: Tuple[float, ...] = (0.001, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0)
    cv_folds: int = 5
    ensemble_size: int = 10
    train_fraction: float = 0.6
    size_cap: int = 3000
    gamma_grid_points: int = 101
    mu_grid_points: int = 21
    hybrid_uncertainty: Measure = Measure.U_A
    hybrid_robustness: Tuple[Measure, ...] = (Measure.R_GLOB, Measure.R_LOC)
    descriptor_dir: Path = Path("data/descriptors")
    data_dir: Path = Path("data/raw")
    echo: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if any(size < 1 for size in self.sizes):
            raise ValueError("training sizes must be positive")
        if any(not (0.0 <= beta <= 1.0) for beta in self.betas):
            raise ValueError("betas must lie in [0, 1]")
        if self.hybrid_uncertainty.kind is not MeasureKind.UNCERTAINTY:
            raise ValueError(f"{self.hybrid_uncertainty.value} is not an uncertainty measure")
        if any(m.kind is not MeasureKind.ROBUSTNESS for m in self.hybrid_robustness):
            raise ValueError("hybrid_robustness must name robustness measures")

    @classmethod
    def from_settings(cls, settings: Mapping[str, Any], setting: Setting) -> "ExperimentConfig":
        """
        Build a config from parsed settings (file values with CLI overrides applied).

        Raises:
            ValueError: If ``validate_configuration`` reports a problem
        """
        issues = validate_configuration(settings)
        if issues:
            raise ValueError("Invalid configuration: " + "; ".join(f"{k}: {v}" for k, v in sorted(issues.items())))
        harness = get_harness_config(settings)
        model = get_model_config(settings)
        hybrid = get_hybrid_config(settings)
        return cls(
            datasets=list(harness["datasets"]),
            setting=setting,
            seed=harness["seed"],
            out=harness["out"],
            reps=harness["reps"],
            sizes=tuple(harness["sizes"]),
            betas=tuple(harness["betas"]),
            measures=tuple(parse_measures(harness["measures"])),
            alpha_grid=tuple(model["alpha_grid"]),
            cv_folds=model["cv_folds"],
            ensemble_size=model["ensemble_size"],
            train_fraction=harness["train_fraction"],
            size_cap=harness["size_cap"],
            gamma_grid_points=hybrid["gamma_grid_points"],
            mu_grid_points=hybrid["mu_grid_points"],
            hybrid_uncertainty=Measure.parse(hybrid["uncertainty"]),
            hybrid_robustness=tuple(Measure.parse(m) for m in hybrid["robustness"]),
            descriptor_dir=harness["descriptor_dir"],
            data_dir=harness["data_dir"],
            echo={str(k): str(v) for k, v in sorted(settings.items())},
        )

    @property
    def gamma_grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.gamma_grid_points)

    @property
    def mu_grid(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.mu_grid_points) if self.mu_grid_points > 1 else np.zeros(1)


@dataclass(slots=True)
class ExperimentReport:
    """Results of one run, ready for ``reporting.write_report``.

    ``au_arc_rows`` holds one row per (dataset, size, beta, measure) with the
    AU-ARC averaged over repetitions; ``repetition_rows`` the per-repetition values.
    """

    setting: Setting
    seed: int
    measures: Tuple[Measure, ...]
    au_arc_rows: List[Dict[str, Any]] = field(default_factory=list)
    repetition_rows: List[Dict[str, Any]] = field(default_factory=list)
    curves: Dict[Tuple[str, str], ArcCurve] = field(default_factory=dict)
    instances: Dict[str, pd.DataFrame] = field(default_factory=dict)
    hybrid_rows: List[Dict[str, Any]] = field(default_factory=list)
    seeds: Dict[str, int] = field(default_factory=dict)
    failures: Dict[str, str] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    echo: Dict[str, str] = field(default_factory=dict)

    def warn(self, message: str) -> None:
        logger.warning(message)
        self.warnings.append(message)


@dataclass(slots=True)
class SplitResult:
    """Fitted model, ensemble, per-instance test scores and one curve per measure."""

    alpha: float
    model: NbcModel
    ensemble: Optional[Ensemble]
    scores: pd.DataFrame
    curves: Dict[Measure, ArcCurve]


def split_seed(master: int, dataset_id: str, repetition: int) -> int:
    return derive_seed(master, dataset_id, repetition, "split")


def model_seed(master: int, dataset_id: str, repetition: int) -> int:
    return derive_seed(master, dataset_id, repetition, "model")


def cell_seed(master: int, dataset_id: str, size: int, beta: float, repetition: int) -> int:
    return derive_seed(master, dataset_id, size, beta, repetition)


def split_for_repetition(
    loaded: LoadedDataset, config: ExperimentConfig, repetition: int
) -> Tuple[CategoricalDataset, CategoricalDataset]:
    """Train/test split of one repetition; a provided test set is kept as is (apart from capping)."""
    spec = SplitSpec(
        seed=split_seed(config.seed, loaded.name, repetition),
        train_fraction=config.train_fraction,
        size_cap=config.size_cap,
    )
    if loaded.provided_test is not None:
        return split_with_test(loaded.data, loaded.provided_test, spec)
    return split(loaded.data, spec)


def curves_from_scores(scores: pd.DataFrame, measures: Sequence[Measure]) -> Dict[Measure, ArcCurve]:
    """One accuracy-rejection curve per measure column of a per-instance score table."""
    correct = scores["correct"].to_numpy(dtype=bool)
    return {m: arc(order_scores(scores[m.value].to_numpy(), m.direction, m.value), correct) for m in measures}


def evaluate_split(
    train: CategoricalDataset,
    test: CategoricalDataset,
    config: ExperimentConfig,
    seed: int,
    measures: Optional[Sequence[Measure]] = None,
) -> SplitResult:
    """
    Tune, fit and score one train/test split.

    Args:
        train: Training data (possibly subsampled and corrupted)
        test: Test data, never altered
        config: Smoothing grid, CV folds and ensemble size
        seed: Model seed; CV folds and ensemble bootstraps derive from it
        measures: Measures to score (defaults to ``config.measures``)
    """
    chosen = tuple(measures) if measures is not None else config.measures
    alpha = tune_smoothing(train, config.alpha_grid, config.cv_folds, derive_seed(seed, "cv"))
    model = fit(train, alpha)
    ensemble = None
    if any(m.needs_ensemble for m in chosen):
        ensemble = fit_ensemble(train, alpha, config.ensemble_size, derive_seed(seed, "ensemble"))
    scores = score_dataset(model, ensemble, test, chosen)
    return SplitResult(alpha, model, ensemble, scores, curves_from_scores(scores, chosen))


__all__ = [
    "Setting",
    "ExperimentConfig",
    "ExperimentReport",
    "SplitResult",
    "split_seed",
    "model_seed",
    "cell_seed",
    "split_for_repetition",
    "curves_from_scores",
    "evaluate_split",
]
