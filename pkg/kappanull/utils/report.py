"""
Deterministic report serialisation
JSON with fixed key order and 17-significant-digit floats; CSV through pandas
"""
import json
import math
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel


def to_plain(value: Any) -> Any:
    """
    Convert models, numpy values and tuples into plain JSON-able Python values

    Key order of dicts and pydantic fields is preserved.
    """
    if isinstance(value, BaseModel):
        return {name: to_plain(getattr(value, name)) for name in type(value).model_fields}
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    return value


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def _emit(value: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f'{pad}{_emit(str(k), indent, level + 1)}: {_emit(v, indent, level + 1)}' for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        # Numeric rows stay on one line so matrices read as matrices
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            return "[" + ", ".join(_emit(v, indent, level) for v in value) + "]"
        items = [f"{pad}{_emit(v, indent, level + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"Cannot serialise value of type {type(value).__name__}")


def dumps_report(value: Any, indent: int = 2) -> str:
    """
    Serialise a report to JSON text

    Identical inputs give byte-identical output.

    Args:
        value: Pydantic model, dict, list or scalar
        indent: Spaces per nesting level

    Returns:
        JSON string
    """
    return _emit(to_plain(value), indent, 0)


def write_csv(path: str | Path, header: Sequence[str], rows: Sequence[Sequence[float]]) -> Path:
    """
    Write numeric rows with a fixed header

    Args:
        path: Output file
        header: Column names
        rows: Row values

    Returns:
        Resolved output path
    """
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(list(rows), columns=list(header))
    frame.to_csv(path, index=False, float_format="%.17g")
    return path
