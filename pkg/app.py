"""
Command-line entry point for the reliability benchmark.

Subcommands:
- ``standard``: one split per dataset, every reliability measure scored
- ``shift``: the (training size, corruption rate) grid, averaged over repetitions
- ``hybrid``: the standard split plus tuned hybrid uncertainty/robustness orderings
- ``datasets``: list known dataset ids and whether their files are present

Settings come from an optional ``--config`` file (``key = value`` lines);
command-line flags override it. Logging is configured here and nowhere else.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from src.data.registry import get_registry
from src.harness import ExperimentConfig, Setting, log_summary, run_setting, write_report
from src.utils.config import get_app_config, get_harness_config, load_settings
from src.utils.performance import PerformanceTracker

logger = logging.getLogger(__name__)

EPILOG = """examples:
  reliability-bench standard --dataset tic-tac-toe car-evaluation --seed 1 --out results/standard
  reliability-bench shift --config configs/shift.cfg --reps 3 --sizes 50 100 --betas 0 0.2
  reliability-bench hybrid --dataset solar-flare --out results/hybrid
"""


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None, help="Path to a key = value settings file.")
    parser.add_argument("--dataset", nargs="+", default=None, help="Dataset ids to run (see 'datasets').")
    parser.add_argument("--seed", type=int, default=None, help="Master seed.")
    parser.add_argument("--out", type=str, default=None, help="Output directory.")
    parser.add_argument("--reps", type=int, default=None, help="Repetitions per shift cell.")
    parser.add_argument("--sizes", type=int, nargs="+", default=None, help="Training sizes of the shift grid.")
    parser.add_argument("--betas", type=float, nargs="+", default=None, help="Corruption rates of the shift grid.")
    parser.add_argument("--measures", nargs="+", default=None, help="Measure ids to score (default: all).")
    parser.add_argument("--descriptor-dir", type=str, default=None, help="Directory of dataset descriptors.")
    parser.add_argument("--data-dir", type=str, default=None, help="Directory of raw dataset files.")
    parser.add_argument("--log-level", type=str, default=None, help="DEBUG, INFO, WARNING or ERROR.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reliability-bench",
        description="Benchmark reliability measures for naive Bayes classifiers.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for setting in Setting:
        _add_run_arguments(commands.add_parser(setting.value, help=f"Run the {setting.value} setting."))
    listing = commands.add_parser("datasets", help="List dataset ids and file availability.")
    listing.add_argument("--config", type=str, default=None)
    listing.add_argument("--descriptor-dir", type=str, default=None)
    listing.add_argument("--data-dir", type=str, default=None)
    listing.add_argument("--log-level", type=str, default=None)
    return parser


def merge_settings(args: argparse.Namespace) -> Dict[str, Any]:
    """
    File settings overridden by every flag that was given.

    Raises:
        FileNotFoundError: If ``--config`` names a missing file
    """
    settings: Dict[str, Any] = dict(load_settings(Path(args.config))) if args.config else {}
    overrides = {
        "datasets": getattr(args, "dataset", None),
        "seed": getattr(args, "seed", None),
        "out": getattr(args, "out", None),
        "reps": getattr(args, "reps", None),
        "sizes": getattr(args, "sizes", None),
        "betas": getattr(args, "betas", None),
        "measures": getattr(args, "measures", None),
        "descriptor_dir": args.descriptor_dir,
        "data_dir": args.data_dir,
        "log_level": args.log_level,
    }
    settings.update({key: value for key, value in overrides.items() if value is not None})
    return settings


def _list_datasets(settings: Dict[str, Any]) -> int:
    harness = get_harness_config(settings)
    registry = get_registry(harness["descriptor_dir"], harness["data_dir"])
    status = registry.get_status()
    if not status:
        print(f"No dataset descriptors in {harness['descriptor_dir']}")
        return 1
    for dataset_id, info in status.items():
        marker = "ok" if info.get("available") else "missing"
        print(f"{dataset_id:<20} {marker:<8} {info.get('path') or info.get('error', '')}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        0 on success, 1 if any dataset failed, 2 on configuration errors
    """
    args = build_parser().parse_args(list(argv) if argv is not None else None)
    try:
        settings = merge_settings(args)
        log_level = get_app_config(settings)["log_level"]
    except (FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    logging.basicConfig(level=log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    if args.command == "datasets":
        return _list_datasets(settings)

    try:
        config = ExperimentConfig.from_settings(settings, Setting(args.command))
    except ValueError as e:
        logger.error("%s", e)
        return 2
    if not config.datasets:
        logger.error("No datasets given; use --dataset or a 'datasets' setting")
        return 2

    PerformanceTracker.reset_metrics()
    report = run_setting(config)
    written: List[Path] = write_report(report, config.out)
    log_summary(report)
    logger.info("Results in %s (%d files)", config.out, len(written))
    return 1 if report.failures else 0


if __name__ == "__main__":
    sys.exit(main())
