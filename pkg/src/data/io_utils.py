"""
Shared I/O utilities for loading raw tables and writing report files.

Raw categorical datasets arrive as delimited text (comma, semicolon or
whitespace separated, header optional) or as Parquet files. Every cell is read
as a string so that category codes never depend on numeric parsing; the
missing-value sentinel becomes NA.

Key Functions:
- detect_file_format: Determine file format from the filename
- load_dataframe: Loader for dataset files described by a descriptor
- safe_to_parquet: Atomic Parquet writer used by the report emitter
"""

from __future__ import annotations

import logging
import os
import time
from pathlib import Path
from typing import Optional, Sequence, Union

import pandas as pd

logger = logging.getLogger(__name__)

WHITESPACE = "whitespace"

_TEXT_SUFFIXES = (".csv", ".data", ".txt", ".test", ".tsv")


def detect_file_format(filename: str) -> Optional[str]:
    """Detect file format from the filename extension.

    Returns:
        ``'parquet'``, ``'text'`` or None when the extension is unknown
    """
    fname_lower = filename.lower()
    if fname_lower.endswith(".parquet"):
        return "parquet"
    if fname_lower.endswith(_TEXT_SUFFIXES):
        return "text"
    return None


def _separator(delimiter: str) -> str:
    if delimiter == WHITESPACE:
        return r"\s+"
    if delimiter in ("\\t", "tab"):
        return "\t"
    return delimiter


def _normalize_strings(df: pd.DataFrame, missing: str) -> pd.DataFrame:
    """Strip column names and cell text; turn the missing sentinel into NA."""
    df.columns = [str(c).strip() for c in df.columns]
    for column in df.columns:
        series = df[column]
        not_null = series.notna()
        df[column] = series.where(~not_null, series.astype(str).str.strip())
    return df.replace({missing: pd.NA})


def _read_text(
    source: Path,
    *,
    delimiter: str,
    header: bool,
    names: Optional[Sequence[str]],
    skip_rows: int,
    missing: str,
) -> pd.DataFrame:
    return pd.read_csv(
        source,
        sep=_separator(delimiter),
        header=0 if header else None,
        names=list(names) if names else None,
        skiprows=skip_rows,
        dtype=str,
        keep_default_na=False,
        na_values=[missing],
        skipinitialspace=True,
        engine="python" if delimiter == WHITESPACE else "c",
    )


def load_dataframe(
    raw_input: Union[Path, str],
    *,
    delimiter: str = ",",
    header: bool = True,
    names: Optional[Sequence[str]] = None,
    skip_rows: int = 0,
    missing: str = "?",
) -> pd.DataFrame:
    """Load a dataset file into string-valued columns.

    Files ending in ``.parquet`` are read with pyarrow; anything else is parsed
    as delimited text (UCI files use ``.data``, ``.csv`` and suffix-less names).

    Args:
        raw_input: File path
        delimiter: Field separator; ``"whitespace"`` splits on runs of blanks
        header: Whether the first (non-skipped) row holds column names
        names: Column names to use; required in practice for headerless files
        skip_rows: Number of leading lines to ignore (e.g. comment headers)
        missing: Missing-value sentinel, converted to NA

    Returns:
        pd.DataFrame whose non-missing cells are stripped strings

    Raises:
        FileNotFoundError: If the file doesn't exist
        ValueError: If the file cannot be parsed
    """
    raw_path = Path(raw_input)
    if not raw_path.exists():
        raise FileNotFoundError(f"File not found: {raw_path}")
    logger.info("Loading data from %s", raw_path)

    if detect_file_format(raw_path.name) == "parquet":
        df = pd.read_parquet(raw_path)
        if names:
            df.columns = list(names)
        return _normalize_strings(df.astype(object), missing)

    try:
        df = _read_text(raw_path, delimiter=delimiter, header=header, names=names, skip_rows=skip_rows, missing=missing)
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise ValueError(f"Could not parse {raw_path} as delimited text: {e}") from e
    return _normalize_strings(df, missing)


def safe_to_parquet(
    df: pd.DataFrame, dest: Path, *, compression: str = "snappy", attempts: int = 5, backoff: float = 0.2
) -> None:
    """Write a DataFrame to Parquet atomically with retries.

    The frame goes to a temporary file in the same directory, which then
    replaces the destination. A concurrent reader can make the replace fail
    with PermissionError on Windows; retry a few times before giving up.
    """
    dest = Path(dest)
    tmp = dest.with_name(dest.name + ".tmp")
    last_exc: Optional[BaseException] = None
    for attempt in range(1, attempts + 1):
        try:
            if tmp.exists():
                tmp.unlink()
            df.to_parquet(tmp, compression=compression, index=False)
            os.replace(tmp, dest)
            return
        except (OSError, PermissionError) as e:
            last_exc = e
            logger.debug("Parquet write to %s failed (attempt %d/%d): %s", dest, attempt, attempts, e)
            time.sleep(backoff * attempt)
    assert last_exc is not None
    raise last_exc


__all__ = [
    "WHITESPACE",
    "detect_file_format",
    "load_dataframe",
    "safe_to_parquet",
]
