import json
import math
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from .errors import ConfigError, ContractViolation, NumericalFailure

FLOAT_FORMAT = '%.17g'
LINE_TERMINATOR = '\n'


def serialize_for_json(obj: Any) -> Any:
    """
    Convert numpy, pandas and dataclass values into plain JSON types

    Non-finite floats become the strings "inf", "-inf" and "nan".
    """
    if isinstance(obj, dict):
        return {str(k): serialize_for_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [serialize_for_json(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return serialize_for_json(obj.tolist())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, pd.DataFrame):
        return serialize_for_json(table_records(obj))
    if hasattr(obj, 'to_dict'):
        return serialize_for_json(obj.to_dict())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(obj, complex):
        return {'real': obj.real, 'imag': obj.imag}
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def table_records(frame: pd.DataFrame) -> List[Dict[str, Any]]:
    """Rows as dicts with missing cells as None"""
    records = frame.astype(object).where(frame.notna(), None).to_dict(orient='records')
    return records


def to_json(payload: Any) -> str:
    return json.dumps(serialize_for_json(payload), indent=2, sort_keys=True,
                      allow_nan=False) + LINE_TERMINATOR


def to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator=LINE_TERMINATOR)


def write_output(payload: Union[pd.DataFrame, Dict[str, Any]], fmt: str,
                 path: Optional[str] = None) -> int:
    """
    Write a table or report to a file or stdout

    Args:
        payload: DataFrame (CSV or JSON records) or dict (JSON only)
        fmt: "csv" or "json"
        path: destination file; stdout when None

    Returns:
        Number of data rows written (0 for reports)
    """
    if fmt == 'csv':
        if not isinstance(payload, pd.DataFrame):
            raise ContractViolation("csv output needs a table")
        text, rows = to_csv(payload), len(payload)
    elif fmt == 'json':
        text = to_json(payload)
        rows = len(payload) if isinstance(payload, pd.DataFrame) else 0
    else:
        raise ContractViolation(f"unknown output format {fmt!r}")

    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(Path(path), 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
    return rows


def format_error_message(error: Exception) -> str:
    """
    One-line message for stderr

    Args:
        error: Exception raised by a command

    Returns:
        User-friendly error message
    """
    if isinstance(error, ConfigError):
        return f"❌ Configuration error: {error}"
    if isinstance(error, NumericalFailure):
        advice = error.diagnostics.get('advice')
        suffix = f" ({advice})" if advice else ""
        return f"❌ Numerical failure: {error}{suffix}"
    if isinstance(error, ContractViolation):
        return f"❌ Invalid input: {error}"
    return f"❌ Error: {error}"
