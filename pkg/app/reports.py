"""
Report persistence: canonical JSON with a timestamp sidecar, and CSV spectra.
All writes go through a temp file in the target directory followed by a rename.
"""
import json
import logging
import os
import platform
import tempfile
from dataclasses import asdict, is_dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import jsonschema
import numpy as np
import pandas as pd

from app import __version__
from app.errors import ReportSchemaError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SCHEMA_DIR = Path(__file__).parent / "schemas"

# published v1 schema per report kind, in app/schemas/<kind>.v1.schema.json
REPORT_KINDS = {
    "clifford": "audit",
    "purity": "audit",
    "null-theorem": "audit",
    "maxwell": "residual",
    "gravity": "residual",
    "fock": "fock",
    "wyler": "wyler",
}


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays, complex numbers, enums, paths and dataclasses to JSON types."""
    if isinstance(value, Enum):
        return value.value
    if is_dataclass(value) and not isinstance(value, type):
        if hasattr(value, "as_dict"):
            return to_jsonable(value.as_dict())
        return to_jsonable(asdict(value))
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Path):
        return str(value)
    return value


def canonical_dumps(payload: Dict[str, Any]) -> str:
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def schema_path(kind: str) -> Path:
    return SCHEMA_DIR / f"{kind}.v{SCHEMA_VERSION}.schema.json"


def load_schema(kind: str) -> Dict[str, Any]:
    path = schema_path(kind)
    if not path.is_file():
        raise ReportSchemaError(f"no published schema for report kind '{kind}'")
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def validate_report(body: Dict[str, Any], kind: str) -> None:
    """
    Check a JSON-ready report body against the published schema for its kind.

    Raises:
        ReportSchemaError: listing the first violations with their JSON paths
    """
    validator = jsonschema.Draft202012Validator(load_schema(kind))
    problems = sorted(validator.iter_errors(body), key=lambda err: err.json_path)
    if problems:
        details = "; ".join(f"{err.json_path}: {err.message}" for err in problems[:5])
        raise ReportSchemaError(f"{kind} report violates its v{SCHEMA_VERSION} schema: {details}")


def sidecar_path(path: Path) -> Path:
    return path.with_name(path.stem + ".meta.json")


def write_json_report(path: Path, payload: Dict[str, Any], command: Optional[str] = None,
                      kind: Optional[str] = None) -> Path:
    """
    Write a report atomically and its timestamp sidecar next to it.

    Args:
        path: Target report path
        payload: Report body; schema_version is added
        command: Command line recorded in the sidecar
        kind: Report kind; when given the body is validated before anything is written

    Returns:
        Path of the written report
    """
    path = Path(path)
    body = dict(payload)
    body["schema_version"] = SCHEMA_VERSION
    text = canonical_dumps(body)
    if kind is not None:
        validate_report(json.loads(text), kind)
    _atomic_write_text(path, text)

    meta = {
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "host": platform.node(),
        "python": platform.python_version(),
        "workbench_version": __version__,
        "command": command,
        "report": path.name,
    }
    _atomic_write_text(sidecar_path(path), canonical_dumps(meta))
    logger.info(f"Wrote report {path}")
    return path


def write_csv(path: Path, frame: pd.DataFrame) -> Path:
    """CSV with header row, dot decimals and \\n line endings, written atomically."""
    path = Path(path)
    text = frame.to_csv(index=False, lineterminator="\n")
    _atomic_write_text(path, text)
    logger.info(f"Wrote table {path} ({len(frame)} rows)")
    return path


def read_json_report(path: Path) -> Dict[str, Any]:
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)
