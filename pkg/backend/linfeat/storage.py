"""Persistent storage for run outputs"""

import json
import os
import tempfile
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional, Union

import pandas as pd

from .errors import DataError


def ensure_output_dir(output_dir: Union[str, Path]) -> Path:
    """Ensure the output directory exists"""
    output_dir = Path(output_dir)
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DataError(f"cannot create output directory {output_dir}: {e}") from e
    return output_dir


def _atomic_write_text(path: Path, text: str) -> Path:
    """Write text via a temporary file in the same directory, then rename"""
    ensure_output_dir(path.parent)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except OSError as e:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise DataError(f"cannot write {path}: {e}") from e
    return path


def write_dataframe(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Write a table as UTF-8 CSV with LF line endings

    Floats use pandas' default repr formatting, which round-trips exactly.
    """
    text = frame.to_csv(index=False, lineterminator="\n")
    return _atomic_write_text(Path(path), text)


def dumps_report(report_data: Dict) -> str:
    """Serialize a report deterministically (stable key order, shortest float repr)"""
    return json.dumps(report_data, indent=2, sort_keys=True, default=str) + "\n"


def save_report(path: Union[str, Path], report_data: Dict) -> Path:
    """Save a run report to disk, stamping saved_at"""
    report_data = dict(report_data)
    report_data["saved_at"] = datetime.now().isoformat()
    return _atomic_write_text(Path(path), dumps_report(report_data))


def load_report(path: Union[str, Path]) -> Optional[Dict]:
    """Load a run report from disk"""
    path = Path(path)
    if not path.exists():
        return None
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (json.JSONDecodeError, IOError):
        return None
