"""File formats shared across the CLI, tests, and session service.

Matrix files are JSON documents ``{"n": <int>, "data": [[row], ...]}``.
Traces are JSON Lines, one record per line.  All floats are written with
Python's shortest round-trip repr, which preserves the full 53-bit value
(at least 15 significant decimal digits), so identical inputs always
serialise to identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .linalg import as_matrix


def matrix_to_obj(m: np.ndarray) -> dict:
    return {"n": int(m.shape[0]) if m.size else 0, "data": [[float(x) for x in row] for row in m]}


def matrix_from_obj(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "n" not in obj or "data" not in obj:
        raise ValidationError('matrix object must have the form {"n": <int>, "data": [[...], ...]}')
    n = obj["n"]
    data = obj["data"]
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f'matrix field "n" must be a positive integer, got {n!r}')
    if not isinstance(data, list) or len(data) != n or any(
        not isinstance(row, list) or len(row) != n for row in data
    ):
        raise ValidationError(f'matrix field "data" must be an {n}x{n} array of numbers')
    try:
        return as_matrix(data)
    except ValidationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"matrix entries must be numbers: {exc}") from exc


def load_matrix(path) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read matrix file {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"matrix file {path} is not valid JSON: {exc}") from exc
    return matrix_from_obj(obj)


def save_matrix(path, m: np.ndarray) -> None:
    Path(path).write_text(dumps_canonical(matrix_to_obj(m)) + "\n")


def dumps_canonical(obj) -> str:
    """Compact JSON with a fixed key order (insertion order) and repr floats."""
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)
