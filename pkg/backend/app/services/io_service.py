# IO Service
# File: io_service.py
# Author: Transport Toolkit Team
# Date: 2026-10-10
# Purpose: Read and write schema-versioned JSON documents and deterministic CSV tables

import json
from pathlib import Path
from typing import List, Optional, Sequence, Type, TypeVar, Union

import pandas as pd
from pydantic import BaseModel, ValidationError

from app.core.exceptions import InvalidInputError
from app.utils.logger import get_service_logger

logger = get_service_logger("io")

FLOAT_FORMAT = "%.12g"

DocumentT = TypeVar("DocumentT", bound=BaseModel)
PathLike = Union[str, Path]


def load_document(path: PathLike, model: Type[DocumentT]) -> DocumentT:
    """
    Parse a JSON file into a document model.

    Raises:
        InvalidInputError: when the file is missing, is not JSON, or fails validation;
            the message names the file
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise InvalidInputError(f"{path}: file not found") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    try:
        return model.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ())) or "document"
        raise InvalidInputError(f"{path}: invalid {model.__name__} at {where}: {first.get('msg')}") from exc


def save_document(document: BaseModel, path: PathLike) -> Path:
    """Write a document as indented JSON with the "pass" alias on check reports"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(document.model_dump_json(indent=2, by_alias=True) + "\n", encoding="utf-8")
    logger.info(f"wrote {path}")
    return path


def write_csv(rows: Union[pd.DataFrame, Sequence[Sequence[float]]], path: PathLike, columns: Optional[List[str]] = None, header_comment: Optional[str] = None) -> Path:
    """
    Write a table with a mandatory header row and fixed float formatting.

    Args:
        rows: DataFrame, or row sequences paired with `columns`
        header_comment: Optional line written first as "# ..."
    """
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows), columns=columns)
    if frame.columns.empty:
        raise InvalidInputError("CSV output needs column names")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        if header_comment:
            handle.write(f"# {header_comment}\n")
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"wrote {path} ({len(frame)} rows)")
    return path


def format_csv(frame: pd.DataFrame, header_comment: Optional[str] = None) -> str:
    """The text write_csv would produce, for printing to stdout"""
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return f"# {header_comment}\n{body}" if header_comment else body
