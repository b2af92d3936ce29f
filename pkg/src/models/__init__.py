"""Classifier package: naive Bayes fitting, inference and model export."""

from .naive_bayes import (
    DegenerateEvidenceError,
    GenerativeClassifier,
    NbcModel,
    cv_accuracy,
    fit,
    fit_tuned,
    tune_smoothing,
)
from .serialization import dumps, load_model, loads, save_model

__all__ = [
    "DegenerateEvidenceError",
    "GenerativeClassifier",
    "NbcModel",
    "cv_accuracy",
    "fit",
    "fit_tuned",
    "tune_smoothing",
    "dumps",
    "loads",
    "load_model",
    "save_model",
]
