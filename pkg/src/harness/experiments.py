"""The three experiment settings: standard, distribution shift and hybrid ordering.

A failure on one dataset is logged and recorded in the report; the remaining
datasets still run.
"""

from __future__ import annotations

import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.data.dataset import CategoricalDataset, LoadedDataset
from src.data.registry import DatasetRegistry, get_registry
from src.data.sampling import corrupt_features, derive_seed, subsample
from src.evaluation.arc import ArcCurve, arc, mean_arc, order_scores
from src.evaluation.hybrid import HybridWeights, gamma_opt, hybrid_au_arc, hybrid_order, tune_gamma_train, tune_mu
from src.harness.pipeline import (
    ExperimentConfig,
    ExperimentReport,
    Setting,
    SplitResult,
    cell_seed,
    evaluate_split,
    model_seed,
    split_for_repetition,
    split_seed,
)
from src.measures.catalog import Measure
from src.measures.scoring import measure_matrix
from src.utils.performance import monitor_performance, timed_stage

logger = logging.getLogger(__name__)

FULL_CELL = "full"


def cell_label(size: int, beta: float) -> str:
    return f"N{size}-b{beta:.2f}"


def _record_cell(
    report: ExperimentReport,
    dataset_id: str,
    size: int,
    beta: float,
    results: Sequence[SplitResult],
    measures: Sequence[Measure],
    cell: str = FULL_CELL,
) -> None:
    suffix = "" if report.setting is not Setting.SHIFT else f".{cell}"
    for measure in measures:
        curves: List[ArcCurve] = [r.curves[measure] for r in results]
        mean_curve = mean_arc(curves)
        report.curves[(dataset_id, f"{measure.value}{suffix}")] = mean_curve
        report.au_arc_rows.append(
            {
                "dataset": dataset_id,
                "cell": cell,
                "size": size,
                "beta": beta,
                "measure": measure.value,
                "au_arc": float(np.mean([c.au_arc for c in curves])),
                "reps": len(curves),
            }
        )
        for rep, (result, curve) in enumerate(zip(results, curves)):
            report.repetition_rows.append(
                {
                    "dataset": dataset_id,
                    "cell": cell,
                    "size": size,
                    "beta": beta,
                    "rep": rep,
                    "measure": measure.value,
                    "alpha": result.alpha,
                    "au_arc": curve.au_arc,
                }
            )


def _run_datasets(
    config: ExperimentConfig,
    registry: Optional[DatasetRegistry],
    setting: Setting,
    body: Callable[[ExperimentReport, LoadedDataset], None],
) -> ExperimentReport:
    registry = registry or get_registry(config.descriptor_dir, config.data_dir)
    report = ExperimentReport(setting=setting, seed=config.seed, measures=config.measures, echo=dict(config.echo))
    for dataset_id in config.datasets:
        logger.info("Running %s setting on '%s'", setting.value, dataset_id)
        try:
            loaded = registry.load(dataset_id)
            for message in loaded.warnings:
                report.warn(f"{dataset_id}: {message}")
            with timed_stage(f"dataset:{dataset_id}", slow_threshold=600.0):
                body(report, loaded)
        except Exception as e:
            logger.exception("Dataset '%s' failed", dataset_id)
            report.failures[dataset_id] = f"{type(e).__name__}: {e}"
    return report


def _standard_split(
    report: ExperimentReport, loaded: LoadedDataset, config: ExperimentConfig
) -> Tuple[CategoricalDataset, CategoricalDataset, int]:
    seed = model_seed(config.seed, loaded.name, 0)
    report.seeds[f"{loaded.name}/rep0/split"] = split_seed(config.seed, loaded.name, 0)
    report.seeds[f"{loaded.name}/rep0/model"] = seed
    train, test = split_for_repetition(loaded, config, 0)
    return train, test, seed


@monitor_performance(slow_threshold=600.0)
def run_standard(config: ExperimentConfig, registry: Optional[DatasetRegistry] = None) -> ExperimentReport:
    """
    Standard setting: one split per dataset, every measure scored on the test set.

    Args:
        config: Run configuration
        registry: Dataset registry (defaults to the shared one for the config's directories)
    """

    def body(report: ExperimentReport, loaded: LoadedDataset) -> None:
        train, test, seed = _standard_split(report, loaded, config)
        result = evaluate_split(train, test, config, seed)
        _record_cell(report, loaded.name, len(train), 0.0, [result], config.measures)
        report.instances[loaded.name] = result.scores
        logger.info("'%s': alpha=%g, %d train / %d test instances", loaded.name, result.alpha, len(train), len(test))

    return _run_datasets(config, registry, Setting.STANDARD, body)


@monitor_performance(slow_threshold=600.0)
def run_shift(config: ExperimentConfig, registry: Optional[DatasetRegistry] = None) -> ExperimentReport:
    """
    Distribution-shift setting over the (training size, corruption rate) grid.

    Every repetition draws a fresh split; each cell subsamples the training
    part to N instances and corrupts a fraction beta of its feature values.
    The test part is never corrupted. The full, uncorrupted training part is
    reported as an extra cell (beta 0) for rank comparisons. Cells with N
    larger than the training part are skipped with a warning.
    """

    def body(report: ExperimentReport, loaded: LoadedDataset) -> None:
        name = loaded.name
        splits = [split_for_repetition(loaded, config, rep) for rep in range(config.reps)]
        # sizes are checked against the smallest training part over all repetitions
        train_size = min(len(train) for train, _ in splits)

        baseline: List[SplitResult] = []
        for rep, (train, test) in enumerate(splits):
            seed = model_seed(config.seed, name, rep)
            report.seeds[f"{name}/rep{rep}/split"] = split_seed(config.seed, name, rep)
            report.seeds[f"{name}/rep{rep}/model"] = seed
            baseline.append(evaluate_split(train, test, config, seed))
        _record_cell(report, name, train_size, 0.0, baseline, config.measures)

        for size in config.sizes:
            if size > train_size:
                report.warn(f"{name}: skipping N={size}, a training part holds only {train_size} instances")
                continue
            for beta in config.betas:
                if beta == 0.0 and all(len(train) == size for train, _ in splits):
                    _record_cell(report, name, size, beta, baseline, config.measures, cell_label(size, beta))
                    continue
                results: List[SplitResult] = []
                for rep, (train, test) in enumerate(splits):
                    seed = cell_seed(config.seed, name, size, beta, rep)
                    report.seeds[f"{name}/{cell_label(size, beta)}/rep{rep}"] = seed
                    shifted = corrupt_features(subsample(train, size, seed), beta, derive_seed(seed, "corrupt"))
                    results.append(evaluate_split(shifted, test, config, model_seed(config.seed, name, rep)))
                _record_cell(report, name, size, beta, results, config.measures, cell_label(size, beta))
                logger.info("'%s' %s done", name, cell_label(size, beta))

    return _run_datasets(config, registry, Setting.SHIFT, body)


def _hybrid_pair(
    report: ExperimentReport,
    dataset_id: str,
    train: CategoricalDataset,
    result: SplitResult,
    uncertainty: Measure,
    robustness: Measure,
    config: ExperimentConfig,
    seed: int,
) -> None:
    pair = [uncertainty, robustness]
    train_scores = measure_matrix(result.model, result.ensemble, train.features, pair)
    train_correct = result.model.predict_many(train.features) == train.labels
    gamma_train = tune_gamma_train(
        train_scores[uncertainty],
        train_scores[robustness],
        train_correct,
        config.gamma_grid,
        direction_u=uncertainty.direction,
        direction_r=robustness.direction,
    )
    mu = tune_mu(
        train,
        uncertainty,
        robustness,
        config.mu_grid,
        config.cv_folds,
        derive_seed(seed, "mu", robustness.value),
        result.alpha,
        gamma_grid=config.gamma_grid,
        ensemble_size=config.ensemble_size,
    )
    weights = HybridWeights.from_training(gamma_train, mu)

    test_u = result.scores[uncertainty.value].to_numpy()
    test_r = result.scores[robustness.value].to_numpy()
    test_correct = result.scores["correct"].to_numpy(dtype=bool)
    directions = {"direction_u": uncertainty.direction, "direction_r": robustness.direction}
    # gamma_star joins the search grid so the reference weight never scores below it
    search = np.union1d(config.gamma_grid, [weights.gamma_star])
    best = gamma_opt(test_u, test_r, test_correct, search, **directions)
    weights = HybridWeights.from_training(gamma_train, mu, best)

    order = hybrid_order(
        order_scores(test_u, uncertainty.direction), order_scores(test_r, robustness.direction), weights.gamma_star
    )
    curve = arc(order, test_correct)
    report.curves[(dataset_id, f"hybrid-{uncertainty.value}-{robustness.value}")] = curve
    report.hybrid_rows.append(
        {
            "dataset": dataset_id,
            "uncertainty": uncertainty.value,
            "robustness": robustness.value,
            "gamma_train": weights.gamma_train,
            "mu": weights.mu,
            "gamma_star": weights.gamma_star,
            "gamma_opt": weights.gamma_opt,
            "au_arc_uncertainty": result.curves[uncertainty].au_arc,
            "au_arc_robustness": result.curves[robustness].au_arc,
            "au_arc_hybrid": curve.au_arc,
            "au_arc_opt": hybrid_au_arc(test_u, test_r, test_correct, best, **directions),
        }
    )
    logger.info(
        "'%s' hybrid (%s, %s): gamma_train=%.2f mu=%.2f gamma*=%.3f AU-ARC %.4f",
        dataset_id,
        uncertainty.value,
        robustness.value,
        gamma_train,
        mu,
        weights.gamma_star,
        curve.au_arc,
    )


@monitor_performance(slow_threshold=600.0)
def run_hybrid(config: ExperimentConfig, registry: Optional[DatasetRegistry] = None) -> ExperimentReport:
    """
    Hybrid setting: the standard split plus one hybrid ordering per configured robustness measure.

    The per-measure results of the split are reported as in the standard setting.
    """
    needed = list(config.measures)
    for measure in (config.hybrid_uncertainty, *config.hybrid_robustness):
        if measure not in needed:
            needed.append(measure)

    def body(report: ExperimentReport, loaded: LoadedDataset) -> None:
        train, test, seed = _standard_split(report, loaded, config)
        result = evaluate_split(train, test, config, seed, needed)
        _record_cell(report, loaded.name, len(train), 0.0, [result], needed)
        report.instances[loaded.name] = result.scores
        for robustness in config.hybrid_robustness:
            _hybrid_pair(report, loaded.name, train, result, config.hybrid_uncertainty, robustness, config, seed)

    report = _run_datasets(config, registry, Setting.HYBRID, body)
    report.measures = tuple(needed)
    return report


RUNNERS: Dict[Setting, Callable[..., ExperimentReport]] = {
    Setting.STANDARD: run_standard,
    Setting.SHIFT: run_shift,
    Setting.HYBRID: run_hybrid,
}


def run_setting(config: ExperimentConfig, registry: Optional[DatasetRegistry] = None) -> ExperimentReport:
    return RUNNERS[config.setting](config, registry)


__all__ = ["FULL_CELL", "cell_label", "run_standard", "run_shift", "run_hybrid", "run_setting", "RUNNERS"]
