"""Reliability measures: uncertainty, robustness and their catalogue."""

from .catalog import ALL_MEASURES, Measure, MeasureKind, ReliabilityValue, RobustnessValue, UncertaintyValue
from .robustness import ContaminationRadius, is_robust_local, r_global, r_local, r_local_oracle
from .scoring import measure_instance, score_dataset
from .uncertainty import Ensemble, ensemble_uncertainties, fit_ensemble, u_conf, u_entropy, u_max

__all__ = [
    "ALL_MEASURES",
    "Measure",
    "MeasureKind",
    "ReliabilityValue",
    "RobustnessValue",
    "UncertaintyValue",
    "ContaminationRadius",
    "is_robust_local",
    "r_global",
    "r_local",
    "r_local_oracle",
    "measure_instance",
    "score_dataset",
    "Ensemble",
    "ensemble_uncertainties",
    "fit_ensemble",
    "u_conf",
    "u_entropy",
    "u_max",
]
