"""Batch evaluation of the reliability measures on a dataset."""

from __future__ import annotations

import logging
from typing import Callable, Dict, Optional, Sequence

import numpy as np
import pandas as pd

from src.data.dataset import CategoricalDataset
from src.measures.catalog import (
    ALL_MEASURES,
    Measure,
    MeasureKind,
    ReliabilityValue,
    RobustnessValue,
    UncertaintyValue,
)
from src.measures.robustness import r_global_many, r_local_many
from src.measures.uncertainty import Ensemble, ensemble_uncertainties_many, u_conf_many, u_entropy_many, u_max_many
from src.models.naive_bayes import NbcModel
from src.utils.performance import monitor_performance

logger = logging.getLogger(__name__)

INSTANCE_COLUMNS = ["instance", "label", "prediction", "correct"]

_SINGLE_MODEL: Dict[Measure, Callable[[NbcModel, np.ndarray], np.ndarray]] = {
    Measure.U_MAX: u_max_many,
    Measure.U_CONF: u_conf_many,
    Measure.U_H: u_entropy_many,
    Measure.R_GLOB: r_global_many,
    Measure.R_LOC: r_local_many,
}


def measure_matrix(
    model: NbcModel,
    ensemble: Optional[Ensemble],
    features: np.ndarray,
    measures: Sequence[Measure] = ALL_MEASURES,
) -> Dict[Measure, np.ndarray]:
    """
    Values of the requested measures for every row of ``features``.

    Raises:
        ValueError: If an ensemble measure is requested without an ensemble
    """
    x = np.asarray(features, dtype=np.int64)
    values: Dict[Measure, np.ndarray] = {}
    ensemble_needed = [m for m in measures if m.needs_ensemble]
    if ensemble_needed:
        if ensemble is None:
            raise ValueError(f"Measures {[m.value for m in ensemble_needed]} need an ensemble")
        total, aleatoric, epistemic = ensemble_uncertainties_many(ensemble, x)
        decomposition = {Measure.U_T: total, Measure.U_A: aleatoric, Measure.U_E: epistemic}
    for measure in measures:
        if measure.needs_ensemble:
            values[measure] = decomposition[measure]
        else:
            values[measure] = _SINGLE_MODEL[measure](model, x)
    return values


@monitor_performance(slow_threshold=60.0)
def score_dataset(
    model: NbcModel,
    ensemble: Optional[Ensemble],
    dataset: CategoricalDataset,
    measures: Sequence[Measure] = ALL_MEASURES,
) -> pd.DataFrame:
    """
    Per-instance table: index, label, prediction, correctness and one column per measure.

    Columns are named by measure id, in the order requested.
    """
    predictions = model.predict_many(dataset.features)
    instance_values = (np.arange(len(dataset)), dataset.labels, predictions, predictions == dataset.labels)
    frame = pd.DataFrame(dict(zip(INSTANCE_COLUMNS, instance_values)))
    for measure, column in measure_matrix(model, ensemble, dataset.features, measures).items():
        frame[measure.value] = column
    logger.debug("Scored %d instances on %d measures", len(frame), len(measures))
    return frame


def measure_instance(
    model: NbcModel, ensemble: Optional[Ensemble], f: Sequence[int], measures: Sequence[Measure] = ALL_MEASURES
) -> Dict[Measure, ReliabilityValue]:
    """Every requested measure for one instance, as typed values with their orientation."""
    x = model.schema.check_features(f)[np.newaxis, :]
    result: Dict[Measure, ReliabilityValue] = {}
    for measure, column in measure_matrix(model, ensemble, x, measures).items():
        value_type = RobustnessValue if measure.kind is MeasureKind.ROBUSTNESS else UncertaintyValue
        result[measure] = value_type(measure, float(column[0]))
    return result


__all__ = ["INSTANCE_COLUMNS", "measure_matrix", "score_dataset", "measure_instance"]
