"""Plain-text (JSON) export of fitted naive Bayes models.

Floats are written with their shortest round-tripping representation, so
``loads(dumps(model))`` reproduces every probability bit for bit.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

from src.data.dataset import FeatureSchema
from src.models.naive_bayes import NbcModel

logger = logging.getLogger(__name__)

FORMAT_NAME = "naive-bayes-model"
FORMAT_VERSION = 1


def _schema_payload(schema: FeatureSchema) -> Dict[str, Any]:
    return {
        "cardinalities": list(schema.cardinalities),
        "class_count": schema.class_count,
        "feature_names": list(schema.feature_names) if schema.feature_names is not None else None,
        "value_names": [list(v) for v in schema.value_names] if schema.value_names is not None else None,
        "class_names": list(schema.class_names) if schema.class_names is not None else None,
    }


def _schema_from_payload(payload: Dict[str, Any]) -> FeatureSchema:
    value_names = payload.get("value_names")
    feature_names = payload.get("feature_names")
    class_names = payload.get("class_names")
    return FeatureSchema(
        cardinalities=tuple(payload["cardinalities"]),
        class_count=int(payload["class_count"]),
        feature_names=tuple(feature_names) if feature_names is not None else None,
        value_names=tuple(tuple(v) for v in value_names) if value_names is not None else None,
        class_names=tuple(class_names) if class_names is not None else None,
    )


def dumps(model: NbcModel) -> str:
    """Serialize a model (schema, smoothing, prior and conditional tables)."""
    payload = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "schema": _schema_payload(model.schema),
        "smoothing": model.smoothing,
        "class_prior": model.class_prior.tolist(),
        "conditionals": [table.tolist() for table in model.conditionals],
    }
    return json.dumps(payload, indent=2)


def loads(text: str) -> NbcModel:
    """
    Rebuild a model from ``dumps`` output.

    Raises:
        ValueError: If the text is not a model document of a supported version
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"Not a model document: {e}") from e
    if not isinstance(payload, dict) or payload.get("format") != FORMAT_NAME:
        raise ValueError("Not a model document")
    if payload.get("version") != FORMAT_VERSION:
        raise ValueError(f"Unsupported model format version: {payload.get('version')}")
    try:
        return NbcModel(
            schema=_schema_from_payload(payload["schema"]),
            class_prior=payload["class_prior"],
            conditionals=tuple(payload["conditionals"]),
            smoothing=float(payload["smoothing"]),
        )
    except KeyError as e:
        raise ValueError(f"Model document is missing {e}") from e


def save_model(model: NbcModel, path: Union[str, Path]) -> Path:
    """Write a model to ``path`` (parent directories are created)."""
    dest = Path(path)
    dest.parent.mkdir(parents=True, exist_ok=True)
    dest.write_text(dumps(model), encoding="utf-8")
    logger.info("Saved model to %s", dest)
    return dest


def load_model(path: Union[str, Path]) -> NbcModel:
    """
    Read a model written by ``save_model``.

    Raises:
        FileNotFoundError: If the file does not exist
    """
    source = Path(path)
    if not source.exists():
        raise FileNotFoundError(f"Model file not found: {source}")
    return loads(source.read_text(encoding="utf-8"))


__all__ = ["dumps", "loads", "save_model", "load_model"]
