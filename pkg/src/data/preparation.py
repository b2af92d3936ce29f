"""Prepare coded categorical datasets from raw delimited files.

A plain-text descriptor (``key = value``, same format as experiment configs)
tells the loader which column is the class, which columns to drop, the
missing-value sentinel and an optional target transformation. Rows with a
missing value are removed and every remaining raw value is mapped to a dense
integer code in order of first appearance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd

from src.data.dataset import CategoricalDataset, FeatureSchema, LoadedDataset
from src.data.io_utils import load_dataframe
from src.utils.config import get_list_setting, get_setting, load_settings

logger = logging.getLogger(__name__)


class TargetTransform(Enum):
    """Derived class labels for datasets whose raw target is numeric."""

    NONE = "none"
    SOLAR_FLARE_ANY = "solar-flare-any"
    PASS_FAIL = "pass-fail"


_TRANSFORM_CLASS_NAMES = {
    TargetTransform.SOLAR_FLARE_ANY: ("no-flare", "flare"),
    TargetTransform.PASS_FAIL: ("fail", "pass"),
}

DEFAULT_PASS_THRESHOLD = 10.0


def parse_target(text: Optional[str]) -> Tuple[TargetTransform, Optional[float]]:
    """Parse ``solar-flare-any``, ``pass-fail:<threshold>`` or ``none``.

    ``pass-fail`` without a threshold uses a final grade of 10 (of 20).
    """
    if not text or not text.strip():
        return TargetTransform.NONE, None
    kind, _, arg = text.strip().lower().partition(":")
    try:
        transform = TargetTransform(kind.strip())
    except ValueError:
        raise ValueError(f"Unknown target transformation: {text!r}") from None
    if transform is TargetTransform.PASS_FAIL:
        try:
            return transform, float(arg) if arg.strip() else DEFAULT_PASS_THRESHOLD
        except ValueError:
            raise ValueError(f"Invalid pass-fail threshold in {text!r}") from None
    if arg.strip():
        raise ValueError(f"Target transformation {kind!r} takes no argument")
    return transform, None


@dataclass(slots=True)
class DatasetDescriptor:
    """How to turn one raw file (and optionally its test file) into a dataset."""

    name: str
    class_column: str
    path: Optional[Path] = None
    test_path: Optional[Path] = None
    drop_columns: List[str] = field(default_factory=list)
    missing: str = "?"
    delimiter: str = ","
    header: bool = True
    columns: List[str] = field(default_factory=list)
    skip_rows: int = 0
    target: TargetTransform = TargetTransform.NONE
    threshold: Optional[float] = None
    target_columns: List[str] = field(default_factory=list)

    @classmethod
    def from_settings(
        cls, settings: Mapping[str, str], *, name: Optional[str] = None, base_dir: Optional[Path] = None
    ) -> "DatasetDescriptor":
        """
        Build a descriptor from parsed settings.

        Args:
            settings: Parsed ``key = value`` pairs
            name: Fallback dataset id when the settings carry no ``name``
            base_dir: Directory that relative ``path``/``test_path`` values are resolved against

        Raises:
            ValueError: If ``class_column`` is missing or a value is malformed
        """
        descriptor_name = get_setting(settings, "name", name)
        if not descriptor_name:
            raise ValueError("Descriptor needs a 'name'")
        target, threshold = parse_target(get_setting(settings, "target", None))
        class_column = get_setting(settings, "class_column", None)
        if class_column is None and target is TargetTransform.NONE:
            raise ValueError(f"Descriptor '{descriptor_name}' needs a 'class_column'")

        def _resolve(key: str) -> Optional[Path]:
            raw = get_setting(settings, key, None)
            if raw is None:
                return None
            path = Path(raw)
            return path if path.is_absolute() or base_dir is None else base_dir / path

        return cls(
            name=descriptor_name,
            class_column=class_column or "class",
            path=_resolve("path"),
            test_path=_resolve("test_path"),
            drop_columns=get_list_setting(settings, "drop_columns", [], str),
            missing=get_setting(settings, "missing", "?"),
            delimiter=get_setting(settings, "delimiter", ","),
            header=get_setting(settings, "header", True, bool),
            columns=get_list_setting(settings, "columns", [], str),
            skip_rows=get_setting(settings, "skip_rows", 0, int),
            target=target,
            threshold=threshold,
            target_columns=get_list_setting(settings, "target_columns", [], str),
        )


def load_descriptor(path: Union[str, Path], data_dir: Optional[Path] = None) -> DatasetDescriptor:
    """Read a descriptor file; the dataset id defaults to the file stem."""
    descriptor_path = Path(path)
    settings = load_settings(descriptor_path)
    return DatasetDescriptor.from_settings(settings, name=descriptor_path.stem, base_dir=data_dir)


def _read_frame(path: Path, descriptor: DatasetDescriptor) -> pd.DataFrame:
    return load_dataframe(
        path,
        delimiter=descriptor.delimiter,
        header=descriptor.header,
        names=descriptor.columns or None,
        skip_rows=descriptor.skip_rows,
        missing=descriptor.missing,
    )


def _numeric(frame: pd.DataFrame, column: str) -> pd.Series:
    try:
        return pd.to_numeric(frame[column], errors="raise")
    except (TypeError, ValueError) as e:
        raise ValueError(f"Target column '{column}' is not numeric: {e}") from e


def _derive_target(frame: pd.DataFrame, descriptor: DatasetDescriptor) -> Tuple[pd.DataFrame, pd.Series]:
    """Split off the class column, applying the descriptor's target transformation.

    Transformed targets are coded 0/1 directly (0 = no flare / fail, 1 = flare / pass).
    """
    if descriptor.target is TargetTransform.NONE:
        if descriptor.class_column not in frame.columns:
            raise ValueError(f"Class column '{descriptor.class_column}' not found in {list(frame.columns)}")
        return frame.drop(columns=[descriptor.class_column]), frame[descriptor.class_column]

    sources = descriptor.target_columns or [descriptor.class_column]
    missing = [c for c in sources if c not in frame.columns]
    if missing:
        raise ValueError(f"Target columns {missing} not found in {list(frame.columns)}")

    if descriptor.target is TargetTransform.SOLAR_FLARE_ANY:
        counts = pd.concat([_numeric(frame, c) for c in sources], axis=1)
        labels = (counts > 0).any(axis=1).astype(np.int64)
    else:
        if len(sources) != 1:
            raise ValueError("pass-fail target needs exactly one grade column")
        labels = (_numeric(frame, sources[0]) >= descriptor.threshold).astype(np.int64)
    return frame.drop(columns=sources), labels


def _encode(columns: pd.DataFrame) -> Tuple[np.ndarray, List[int], List[Tuple[str, ...]]]:
    codes, cardinalities, value_names = [], [], []
    for column in columns.columns:
        column_codes, uniques = pd.factorize(columns[column], sort=False)
        codes.append(column_codes.astype(np.int64))
        cardinalities.append(max(len(uniques), 1))
        value_names.append(tuple(str(u) for u in uniques))
    matrix = np.column_stack(codes) if codes else np.zeros((len(columns), 0), dtype=np.int64)
    return matrix, cardinalities, value_names


def _prepare_frames(
    frames: List[pd.DataFrame], descriptor: DatasetDescriptor
) -> Tuple[List[CategoricalDataset], List[str]]:
    """Clean and jointly encode one or more frames (train first) under one schema."""
    warnings: List[str] = []
    sizes = [len(f) for f in frames]
    combined = pd.concat(frames, ignore_index=True)
    part = np.repeat(np.arange(len(frames)), sizes)

    absent = [c for c in descriptor.drop_columns if c not in combined.columns]
    if absent:
        warnings.append(f"{descriptor.name}: drop_columns not present: {absent}")
    combined = combined.drop(columns=[c for c in descriptor.drop_columns if c in combined.columns])

    complete = combined.notna().all(axis=1).to_numpy()
    dropped = int((~complete).sum())
    if dropped:
        warnings.append(f"{descriptor.name}: removed {dropped} rows with missing values")
    combined = combined.loc[complete].reset_index(drop=True)
    part = part[complete]
    if combined.empty:
        raise ValueError(f"Dataset '{descriptor.name}' is empty after cleaning")

    feature_frame, raw_labels = _derive_target(combined, descriptor)

    if descriptor.target is TargetTransform.NONE:
        label_codes, label_uniques = pd.factorize(raw_labels, sort=False)
        labels = label_codes.astype(np.int64)
        class_names: Tuple[str, ...] = tuple(str(u) for u in label_uniques)
    else:
        labels = raw_labels.to_numpy(dtype=np.int64)
        class_names = _TRANSFORM_CLASS_NAMES[descriptor.target]
    present = np.unique(labels)
    if len(present) < 2:
        raise ValueError(f"Dataset '{descriptor.name}' has fewer than 2 classes after cleaning")

    features, cardinalities, value_names = _encode(feature_frame)
    schema = FeatureSchema(
        cardinalities=tuple(cardinalities),
        class_count=len(class_names),
        feature_names=tuple(str(c) for c in feature_frame.columns),
        value_names=tuple(value_names),
        class_names=class_names,
    )
    datasets = [CategoricalDataset(schema, features[part == i], labels[part == i]) for i in range(len(frames))]

    for message in warnings:
        logger.warning(message)
    logger.info(
        "Prepared '%s': %d instances, %d features, %d classes",
        descriptor.name,
        len(labels),
        schema.feature_count,
        schema.class_count,
    )
    return datasets, warnings


def load_dataset(path: Union[str, Path], descriptor: DatasetDescriptor) -> CategoricalDataset:
    """
    Load one raw file into a coded dataset.

    Args:
        path: Delimited-text (or Parquet) file
        descriptor: Preparation rules

    Returns:
        CategoricalDataset with missing rows removed, dropped columns excluded and
        the raw-value code tables stored in the schema's ``value_names``

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If the file cannot be parsed, the class column has fewer than
            2 classes or no rows survive cleaning
    """
    (dataset,), _ = _prepare_frames([_read_frame(Path(path), descriptor)], descriptor)
    return dataset


def prepare(descriptor: DatasetDescriptor) -> LoadedDataset:
    """Load a descriptor's data file and, when named, its provided test file.

    Train and test rows are encoded together (train first) so codes agree.
    """
    if descriptor.path is None:
        raise ValueError(f"Descriptor '{descriptor.name}' has no 'path'")
    frames = [_read_frame(descriptor.path, descriptor)]
    if descriptor.test_path is not None:
        frames.append(_read_frame(descriptor.test_path, descriptor))
    datasets, warnings = _prepare_frames(frames, descriptor)
    provided_test = datasets[1] if len(datasets) > 1 else None
    if provided_test is not None and (len(datasets[0]) == 0 or len(provided_test) == 0):
        raise ValueError(f"Dataset '{descriptor.name}' has an empty train or test part after cleaning")
    return LoadedDataset(descriptor.name, datasets[0], provided_test, tuple(warnings))


def describe(dataset: CategoricalDataset) -> Dict[str, object]:
    """Summary counts used in logs and run manifests."""
    return {
        "instances": len(dataset),
        "features": dataset.schema.feature_count,
        "classes": dataset.schema.class_count,
        "class_counts": dataset.class_counts().tolist(),
    }


__all__ = [
    "TargetTransform",
    "DatasetDescriptor",
    "parse_target",
    "load_descriptor",
    "load_dataset",
    "prepare",
    "describe",
]
