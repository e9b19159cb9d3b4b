"""Space files and flat report documents.

A space file is one JSON document holding either ``points`` plus ``norm``
(linf, l1 or l2) or a row-major ``distance_matrix``, together with
``weights`` and optional ``labels``. Numbers written as strings
(``"0.25"``, ``"1/3"``) are read as exact rationals; bare JSON floats stay
floats.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from .builders import NORMS, from_points
from .space import MetricError, Space, exact_number


class SpaceFileError(ValueError):
    """Malformed space file; the message names the line or the field."""


def _number(value, where: str):
    if isinstance(value, bool):
        raise SpaceFileError(f"field {where}: expected a number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise SpaceFileError(f"field {where}: non-finite number")
        return value
    if isinstance(value, str):
        try:
            return exact_number(value)
        except (ValueError, ZeroDivisionError):
            raise SpaceFileError(f"field {where}: cannot parse {value!r} as a number") from None
    raise SpaceFileError(f"field {where}: expected a number, got {type(value).__name__}")


def _vector(value, where: str) -> list:
    if not isinstance(value, list):
        raise SpaceFileError(f"field {where}: expected a list")
    return [_number(v, f"{where}[{i}]") for i, v in enumerate(value)]


def space_from_document(doc: Mapping) -> Space:
    if not isinstance(doc, dict):
        raise SpaceFileError("space file must hold a JSON object")
    if "weights" not in doc:
        raise SpaceFileError("field weights: missing")
    weights = _vector(doc["weights"], "weights")
    for i, w in enumerate(weights):
        if not isinstance(w, Fraction):
            raise SpaceFileError(f"field weights[{i}]: weights must be exact (int or string)")
    labels = doc.get("labels")
    if labels is not None:
        if not isinstance(labels, list):
            raise SpaceFileError("field labels: expected a list")
        labels = [_vector(lab, f"labels[{i}]") if isinstance(lab, list)
                  else [_number(lab, f"labels[{i}]")] for i, lab in enumerate(labels)]
    has_points = "points" in doc
    has_matrix = "distance_matrix" in doc
    if has_points == has_matrix:
        raise SpaceFileError("exactly one of fields points / distance_matrix is required")
    try:
        if has_points:
            norm = doc.get("norm", "linf")
            if norm not in NORMS:
                raise SpaceFileError(f"field norm: expected one of {NORMS}, got {norm!r}")
            pts = doc["points"]
            if not isinstance(pts, list):
                raise SpaceFileError("field points: expected a list")
            points = [_vector(p, f"points[{i}]") for i, p in enumerate(pts)]
            if len(points) != len(weights):
                raise SpaceFileError(f"field weights: {len(weights)} weights for {len(points)} points")
            return from_points(points, norm, weights)
        rows = doc["distance_matrix"]
        if not isinstance(rows, list):
            raise SpaceFileError("field distance_matrix: expected a list of rows")
        dist = [_vector(r, f"distance_matrix[{i}]") for i, r in enumerate(rows)]
        if len(dist) != len(weights):
            raise SpaceFileError(f"field weights: {len(weights)} weights for {len(dist)} rows")
        return Space(dist, weights, labels)
    except MetricError:
        raise
    except SpaceFileError:
        raise
    except ValueError as exc:
        raise SpaceFileError(str(exc)) from None


def read_space(path) -> Space:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpaceFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return space_from_document(doc)
    except SpaceFileError as exc:
        raise SpaceFileError(f"{path}: {exc}") from None


def _encode(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return v
    return str(exact_number(v))


def space_to_document(space: Space) -> dict:
    doc = {
        "distance_matrix": [[_encode(v) for v in row] for row in space.distance_matrix()],
        "weights": [str(w) for w in space.weights],
    }
    if space.labels is not None:
        doc["labels"] = [[_encode(c) for c in lab] for lab in space.labels]
    return doc


def write_space(space: Space, path) -> None:
    Path(path).write_text(json.dumps(space_to_document(space), indent=1) + "\n")


def format_value(v) -> str:
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if v is None:
        return ""
    return str(v)


def write_kv(pairs: Mapping[str, object], path=None) -> str:
    text = "".join(f"{k}={format_value(v)}\n" for k, v in pairs.items())
    if path is not None:
        Path(path).write_text(text)
    return text


def read_kv(path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        if line.strip():
            k, _, v = line.partition("=")
            out[k] = v
    return out


def write_tsv(header: Iterable[str], rows: Iterable[Iterable], path=None) -> str:
    lines = ["\t".join(header)]
    lines += ["\t".join(format_value(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
