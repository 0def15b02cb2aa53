"""Deterministic report writing: fixed float width, stable key order."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import OutputError


def round12(value: float) -> float:
    """Round to 12 significant digits so reports hash identically."""
    return float(f"{float(value):.12g}")


def round_floats(obj):
    """Recursively round every float in a JSON-shaped structure."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (float, np.floating)):
        return round12(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return round_floats(obj.tolist())
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def write_json(path, obj) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(round_floats(obj), fh, indent=1, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def write_text(path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path
