"""Write run results to disk and log summary tables.

Layout of an output directory::

    au_arc.csv              mean AU-ARC per (dataset, cell, measure) with winner flags
    au_arc_full.parquet     per-repetition AU-ARC values
    arc/<dataset>/<name>.csv  accuracy-rejection curves (mean over repetitions)
    instances/<dataset>.csv per-instance scores (standard and hybrid settings)
    hybrid.csv              hybrid weights and AU-ARCs (hybrid setting)
    wins.csv, ranks.csv, mean_ranks.csv
    rank_shift.csv          measure ranks on full vs. most degraded data (shift setting)
    manifest.txt            seeds, configuration, package versions, timings, failures,
                            and the r_loc rank shift verdict (shift setting)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import List, Optional

import pandas as pd

from src.data.io_utils import safe_to_parquet
from src.harness.experiments import FULL_CELL
from src.harness.pipeline import ExperimentReport, Setting
from src.utils.performance import PerformanceTracker

logger = logging.getLogger(__name__)

ROW_KEYS = ["dataset", "cell", "size", "beta"]
AU_ARC_COLUMNS = [*ROW_KEYS, "measure", "au_arc", "reps", "winner"]
REPORTED_PACKAGES = ("numpy", "pandas", "scipy", "pyarrow", "cachetools")
FLOAT_FORMAT = "%.4f"
RANK_SHIFT_MEASURE = "r_loc"
RANK_SHIFT_REQUIRED_SHARE = 2 / 3


def au_arc_table(report: ExperimentReport) -> pd.DataFrame:
    """Mean AU-ARC rows with a ``winner`` flag on every row maximum (shared on exact ties)."""
    if not report.au_arc_rows:
        return pd.DataFrame(columns=AU_ARC_COLUMNS)
    table = pd.DataFrame(report.au_arc_rows)
    best = table.groupby(ROW_KEYS, sort=False)["au_arc"].transform("max")
    table["winner"] = table["au_arc"] == best
    return table[AU_ARC_COLUMNS]


def wins_table(table: pd.DataFrame) -> pd.DataFrame:
    """Number of rows each measure wins, in measure order of first appearance."""
    if table.empty:
        return pd.DataFrame(columns=["measure", "wins"])
    wins = table.groupby("measure", sort=False)["winner"].sum().astype(int)
    return wins.rename("wins").reset_index()


def ranks_table(table: pd.DataFrame) -> pd.DataFrame:
    """Rank of every measure within its row (1 = highest AU-ARC, ties averaged)."""
    ranked = table[[*ROW_KEYS, "measure", "au_arc"]].copy()
    if ranked.empty:
        return ranked.assign(rank=pd.Series(dtype=float))
    ranked["rank"] = ranked.groupby(ROW_KEYS, sort=False)["au_arc"].rank(ascending=False, method="average")
    return ranked


def mean_ranks_table(ranks: pd.DataFrame) -> pd.DataFrame:
    """Mean rank of every measure per cell, over datasets."""
    if ranks.empty:
        return pd.DataFrame(columns=["cell", "measure", "mean_rank", "datasets"])
    grouped = ranks.groupby(["cell", "measure"], sort=False)["rank"]
    return pd.DataFrame({"mean_rank": grouped.mean(), "datasets": grouped.size()}).reset_index()


def rank_shift_table(ranks: pd.DataFrame) -> pd.DataFrame:
    """
    Per dataset and measure: rank on the full clean training part and on the
    most degraded cell (smallest size, then largest beta).
    """
    columns = ["dataset", "measure", "rank_full", "shifted_cell", "rank_shifted", "kept_or_improved"]
    rows = []
    for dataset, group in ranks.groupby("dataset", sort=False):
        full = group[group["cell"] == FULL_CELL]
        cells = group[group["cell"] != FULL_CELL]
        if full.empty or cells.empty:
            continue
        worst = cells.sort_values(["size", "beta"], ascending=[True, False], kind="mergesort").iloc[0]["cell"]
        shifted = cells[cells["cell"] == worst].set_index("measure")["rank"]
        for _, row in full.iterrows():
            rank_shifted = float(shifted.get(row["measure"], float("nan")))
            rows.append(
                {
                    "dataset": dataset,
                    "measure": row["measure"],
                    "rank_full": float(row["rank"]),
                    "shifted_cell": worst,
                    "rank_shifted": rank_shifted,
                    "kept_or_improved": rank_shifted <= float(row["rank"]),
                }
            )
    return pd.DataFrame(rows, columns=columns)


@dataclass(frozen=True, slots=True)
class RankShiftVerdict:
    """Whether a measure's rank held up under shift in enough datasets.

    The comparison passes when the measure's rank on the most degraded cell is
    equal to or better than its rank on the full clean data in at least
    ``ceil(RANK_SHIFT_REQUIRED_SHARE * datasets)`` datasets (2 of 3).
    """

    measure: str
    datasets: int
    kept_or_improved: int
    required: int

    @property
    def evaluated(self) -> bool:
        return self.datasets > 0

    @property
    def passed(self) -> bool:
        return self.evaluated and self.kept_or_improved >= self.required

    def describe(self) -> str:
        if not self.evaluated:
            return f"{self.measure}: not evaluated (no shifted cells)"
        outcome = "PASS" if self.passed else "FAIL"
        return (
            f"{self.measure}: rank kept or improved in {self.kept_or_improved} of {self.datasets} datasets "
            f"(required {self.required}): {outcome}"
        )


def rank_shift_verdict(rank_shift: pd.DataFrame, measure: str = RANK_SHIFT_MEASURE) -> RankShiftVerdict:
    """Aggregate the ``kept_or_improved`` flags of one measure over datasets."""
    rows = rank_shift[rank_shift["measure"] == measure] if not rank_shift.empty else rank_shift
    datasets = int(len(rows))
    kept = int(rows["kept_or_improved"].sum()) if datasets else 0
    required = max(1, math.ceil(RANK_SHIFT_REQUIRED_SHARE * datasets - 1e-9)) if datasets else 0
    return RankShiftVerdict(measure, datasets, kept, required)


def package_versions() -> List[str]:
    lines = []
    for package in REPORTED_PACKAGES:
        try:
            lines.append(f"{package} {version(package)}")
        except PackageNotFoundError:
            lines.append(f"{package} (not installed)")
    return lines


def write_manifest(report: ExperimentReport, path: Path, verdict: Optional[RankShiftVerdict] = None) -> None:
    """Plain-text record of everything needed to reproduce and audit the run."""
    lines = [
        f"setting: {report.setting.value}",
        f"master_seed: {report.seed}",
        f"written: {datetime.now(timezone.utc).isoformat(timespec='seconds')}",
        f"measures: {', '.join(m.value for m in report.measures)}",
        "",
        "[configuration]",
        *(f"{key} = {value}" for key, value in sorted(report.echo.items())),
        "",
        "[seeds]",
        *(f"{key} = {value}" for key, value in sorted(report.seeds.items())),
        "",
        "[packages]",
        *package_versions(),
        "",
        "[timings]",
    ]
    timings = PerformanceTracker.get_performance_summary()
    lines.append(timings.to_string(index=False) if not timings.empty else "(none)")
    lines += ["", "[failures]"]
    lines += [f"{name}: {reason}" for name, reason in sorted(report.failures.items())] or ["(none)"]
    lines += ["", "[warnings]"]
    lines += list(report.warnings) or ["(none)"]
    if verdict is not None:
        lines += ["", "[rank shift]", verdict.describe()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_csv(frame: pd.DataFrame, path: Path, float_format: Optional[str] = None) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=float_format)
    return path


def write_report(report: ExperimentReport, out_dir: Path) -> List[Path]:
    """
    Write every result file of a run.

    Args:
        report: Results of ``run_standard``, ``run_shift`` or ``run_hybrid``
        out_dir: Output directory, created if missing

    Returns:
        Paths of the files written, manifest last
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []

    table = au_arc_table(report)
    written.append(_write_csv(table, out_dir / "au_arc.csv", FLOAT_FORMAT))
    if report.repetition_rows:
        full_path = out_dir / "au_arc_full.parquet"
        safe_to_parquet(pd.DataFrame(report.repetition_rows), full_path)
        written.append(full_path)

    for (dataset, name), curve in sorted(report.curves.items()):
        written.append(_write_csv(curve.to_frame(), out_dir / "arc" / dataset / f"{name}.csv"))
    for dataset, scores in sorted(report.instances.items()):
        written.append(_write_csv(scores, out_dir / "instances" / f"{dataset}.csv"))
    if report.hybrid_rows:
        written.append(_write_csv(pd.DataFrame(report.hybrid_rows), out_dir / "hybrid.csv", FLOAT_FORMAT))

    ranks = ranks_table(table)
    written.append(_write_csv(wins_table(table), out_dir / "wins.csv"))
    written.append(_write_csv(ranks, out_dir / "ranks.csv", FLOAT_FORMAT))
    written.append(_write_csv(mean_ranks_table(ranks), out_dir / "mean_ranks.csv", FLOAT_FORMAT))
    verdict = None
    if report.setting is Setting.SHIFT:
        rank_shift = rank_shift_table(ranks)
        written.append(_write_csv(rank_shift, out_dir / "rank_shift.csv", FLOAT_FORMAT))
        verdict = rank_shift_verdict(rank_shift)

    manifest = out_dir / "manifest.txt"
    write_manifest(report, manifest, verdict)
    written.append(manifest)
    logger.info("Wrote %d result files to %s", len(written), out_dir)
    return written


def log_summary(report: ExperimentReport) -> None:
    """Log the AU-ARC table (one row per dataset and cell) and the win counts."""
    table = au_arc_table(report)
    if table.empty:
        logger.warning("No results to summarize")
    else:
        wide = table.pivot_table(index=["dataset", "cell"], columns="measure", values="au_arc", sort=False)
        logger.info("AU-ARC (%s):\n%s", report.setting.value, wide.round(4).to_string())
        logger.info("Wins:\n%s", wins_table(table).to_string(index=False))
        if report.setting is Setting.SHIFT:
            logger.info("Rank shift %s", rank_shift_verdict(rank_shift_table(ranks_table(table))).describe())
    if report.hybrid_rows:
        hybrid = pd.DataFrame(report.hybrid_rows)
        logger.info("Hybrid:\n%s", hybrid.round(4).to_string(index=False))
    for name, reason in sorted(report.failures.items()):
        logger.error("Dataset '%s' failed: %s", name, reason)


__all__ = [
    "au_arc_table",
    "wins_table",
    "ranks_table",
    "mean_ranks_table",
    "rank_shift_table",
    "RankShiftVerdict",
    "rank_shift_verdict",
    "package_versions",
    "write_manifest",
    "write_report",
    "log_summary",
]
