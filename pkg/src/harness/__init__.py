"""Benchmark harness: experiment settings, the per-split pipeline and result files."""

from .experiments import RUNNERS, run_setting, run_hybrid, run_shift, run_standard
from .pipeline import ExperimentConfig, ExperimentReport, Setting, evaluate_split
from .reporting import log_summary, write_report

__all__ = [
    "RUNNERS",
    "run_setting",
    "run_standard",
    "run_shift",
    "run_hybrid",
    "ExperimentConfig",
    "ExperimentReport",
    "Setting",
    "evaluate_split",
    "log_summary",
    "write_report",
]
