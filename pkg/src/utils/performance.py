"""Stage timing for benchmark runs.

``monitor_performance`` times a function, ``timed_stage`` a block of code.
Both record into one process-wide table that ``PerformanceTracker`` turns into
the ``[timings]`` section of a run manifest. Calls slower than their threshold
are logged as warnings; failures are counted, logged and re-raised.
"""

import functools
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, Optional

import pandas as pd

perf_logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["stage", "calls", "total_s", "mean_s", "max_s", "errors"]


@dataclass(slots=True)
class StageMetrics:
    calls: int = 0
    total: float = 0.0
    longest: float = 0.0
    errors: int = 0

    def record(self, elapsed: float, ok: bool) -> None:
        self.calls += 1
        self.total += elapsed
        self.longest = max(self.longest, elapsed)
        if not ok:
            self.errors += 1


_stages: Dict[str, StageMetrics] = {}


def _record(stage: str, elapsed: float, slow_threshold: float, error: Optional[BaseException] = None) -> None:
    _stages.setdefault(stage, StageMetrics()).record(elapsed, error is None)
    if error is not None:
        perf_logger.error("%s failed after %.3fs: %s", stage, elapsed, error)
    elif elapsed > slow_threshold:
        perf_logger.warning("SLOW: %s took %.3fs (threshold: %ss)", stage, elapsed, slow_threshold)
    else:
        perf_logger.debug("%s completed in %.3fs", stage, elapsed)


@contextmanager
def timed_stage(stage: str, slow_threshold: float = 30.0) -> Iterator[None]:
    """
    Time a block under the label ``stage``.

    Example:
        with timed_stage("dataset:car-evaluation", slow_threshold=600.0):
            body(report, loaded)
    """
    start = time.perf_counter()
    try:
        yield
    except Exception as e:
        _record(stage, time.perf_counter() - start, slow_threshold, e)
        raise
    _record(stage, time.perf_counter() - start, slow_threshold)


def monitor_performance(slow_threshold: float = 30.0, stage: Optional[str] = None):
    """
    Decorator to time a function and log slow calls.

    Args:
        slow_threshold: Seconds above which a call is logged as slow
        stage: Label in the timing table (defaults to ``module.function``)

    Example:
        @monitor_performance(slow_threshold=60.0)
        def score_dataset(model, ensemble, dataset):
            ...
    """

    def decorator(func: Callable) -> Callable:
        label = stage or f"{func.__module__}.{func.__name__}"

        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            with timed_stage(label, slow_threshold):
                return func(*args, **kwargs)

        return wrapper

    return decorator


class PerformanceTracker:
    """Read and reset the timing table."""

    @staticmethod
    def get_performance_summary() -> pd.DataFrame:
        """One row per stage, sorted by label; times in seconds rounded to milliseconds."""
        if not _stages:
            return pd.DataFrame(columns=SUMMARY_COLUMNS)
        rows = [
            {
                "stage": label,
                "calls": m.calls,
                "total_s": round(m.total, 3),
                "mean_s": round(m.total / m.calls, 3),
                "max_s": round(m.longest, 3),
                "errors": m.errors,
            }
            for label, m in sorted(_stages.items())
        ]
        return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)

    @staticmethod
    def reset_metrics() -> None:
        """Clear the table (between runs and in tests)."""
        _stages.clear()
