"""Model file format (JSON) and the weight range-spec mini-grammar.

Field names are fixed: formatVersion, kind, degreeU, degreeV, knotsU,
knotsV, points (flat [x, y] or [x, y, z] rows; surfaces row-major with the
u index outermost), pointsShape [n1, n2], weights, metadata.  Numbers are
written with 17 significant digits so a save/load round trip is
value-identical; the writer emits keys in a fixed order so identical models
serialize byte-identically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ModelFormatError
from .splines import BSplineCurve, BSplineSurface, KnotVector

FORMAT_VERSION = 1

MODEL_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "fairpia model file",
    "type": "object",
    "required": ["formatVersion", "kind", "degreeU", "knotsU", "points"],
    "properties": {
        "formatVersion": {"const": 1},
        "kind": {"enum": ["curve", "surface"]},
        "degreeU": {"type": "integer", "minimum": 1},
        "degreeV": {"type": "integer", "minimum": 1},
        "knotsU": {"type": "array", "items": {"type": "number"}, "minItems": 4},
        "knotsV": {"type": "array", "items": {"type": "number"}, "minItems": 4},
        "points": {
            "type": "array",
            "minItems": 2,
            "items": {
                "type": "array",
                "items": {"type": "number"},
                "minItems": 2,
                "maxItems": 3,
            },
        },
        "pointsShape": {
            "type": "array",
            "items": {"type": "integer", "minimum": 1},
            "minItems": 2,
            "maxItems": 2,
        },
        "weights": {
            "type": "array",
            "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        },
        "metadata": {"type": "object"},
    },
    "allOf": [
        {
            "if": {"properties": {"kind": {"const": "surface"}}},
            "then": {"required": ["degreeV", "knotsV", "pointsShape"]},
        }
    ],
    "additionalProperties": False,
}


@dataclass
class LoadedModel:
    """A geometry plus the optional sidecar data carried by the file."""

    geometry: BSplineCurve | BSplineSurface
    weights: np.ndarray | None = None
    metadata: dict | None = None

    @property
    def kind(self) -> str:
        return "surface" if isinstance(self.geometry, BSplineSurface) else "curve"

    @property
    def n_points(self) -> int:
        if isinstance(self.geometry, BSplineSurface):
            n1, n2 = self.geometry.shape
            return n1 * n2
        return self.geometry.n


# ---------------------------------------------------------------------------
# serialization


def _fmt_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    xf = float(x)
    if math.isnan(xf) or math.isinf(xf):
        raise ModelFormatError(f"non-finite number {x!r} cannot be serialized")
    return format(xf, ".17g")


def _emit(value: Any, out: list[str], indent: int) -> None:
    pad = "  " * indent
    if value is None:
        out.append("null")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, (int, float, np.integer, np.floating)):
        out.append(_fmt_number(value))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(value.items()):
            out.append(f"{pad}  {json.dumps(str(k))}: ")
            _emit(v, out, indent + 1)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        seq = list(value)
        if not seq:
            out.append("[]")
            return
        # numeric rows stay on one line for readability
        flat = all(isinstance(v, (int, float, np.integer, np.floating)) for v in seq)
        if flat:
            out.append("[" + ", ".join(_fmt_number(v) for v in seq) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(seq):
            out.append(pad + "  ")
            _emit(v, out, indent + 1)
            out.append(",\n" if i < len(seq) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise ModelFormatError(f"unsupported value type {type(value).__name__} in model document")


def dumps_model_document(doc: dict) -> str:
    out: list[str] = []
    _emit(doc, out, 0)
    out.append("\n")
    return "".join(out)


def model_document(
    geometry: BSplineCurve | BSplineSurface,
    weights: np.ndarray | None = None,
    metadata: dict | None = None,
) -> dict:
    """Plain-dict document in the fixed field order."""
    doc: dict[str, Any] = {"formatVersion": FORMAT_VERSION}
    if isinstance(geometry, BSplineSurface):
        n1, n2 = geometry.shape
        doc["kind"] = "surface"
        doc["degreeU"] = geometry.knots_u.degree
        doc["degreeV"] = geometry.knots_v.degree
        doc["knotsU"] = geometry.knots_u.knots.tolist()
        doc["knotsV"] = geometry.knots_v.knots.tolist()
        doc["points"] = [row.tolist() for row in geometry.flat_points()]
        doc["pointsShape"] = [n1, n2]
    elif isinstance(geometry, BSplineCurve):
        doc["kind"] = "curve"
        doc["degreeU"] = geometry.knots.degree
        doc["knotsU"] = geometry.knots.knots.tolist()
        doc["points"] = [row.tolist() for row in geometry.control_points]
    else:
        raise ModelFormatError(f"unsupported geometry type {type(geometry).__name__}")
    if weights is not None:
        doc["weights"] = np.asarray(weights, dtype=float).tolist()
    if metadata:
        doc["metadata"] = metadata
    return doc


def save_model(path, geometry, weights=None, metadata=None) -> None:
    text = dumps_model_document(model_document(geometry, weights, metadata))
    Path(path).write_text(text, encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# parsing


def parse_model_document(doc: dict) -> LoadedModel:
    try:
        import jsonschema

        jsonschema.validate(doc, MODEL_SCHEMA)
    except ImportError:  # pragma: no cover - jsonschema is a hard dependency
        pass
    except Exception as exc:
        path = "/".join(str(p) for p in getattr(exc, "absolute_path", []))
        raise ModelFormatError(f"schema violation at '{path or '<root>'}': {getattr(exc, 'message', exc)}") from None

    kind = doc["kind"]
    points = np.asarray(doc["points"], dtype=float)
    try:
        if kind == "curve":
            kv = KnotVector(np.asarray(doc["knotsU"], dtype=float), int(doc["degreeU"]))
            geometry: BSplineCurve | BSplineSurface = BSplineCurve(kv, points)
        else:
            kv_u = KnotVector(np.asarray(doc["knotsU"], dtype=float), int(doc["degreeU"]))
            kv_v = KnotVector(np.asarray(doc["knotsV"], dtype=float), int(doc["degreeV"]))
            n1, n2 = (int(x) for x in doc["pointsShape"])
            if points.shape[0] != n1 * n2:
                raise ModelFormatError(
                    f"points count {points.shape[0]} does not match pointsShape {n1}x{n2}"
                )
            if points.shape[1] != 3:
                raise ModelFormatError("surface points must be 3D")
            geometry = BSplineSurface(kv_u, kv_v, points.reshape(n1, n2, 3))
    except ModelFormatError:
        raise
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None

    weights = None
    if "weights" in doc:
        weights = np.asarray(doc["weights"], dtype=float)
        n = points.shape[0]
        if weights.shape != (n,):
            raise ModelFormatError(f"weights length {weights.size} does not match {n} points")
    return LoadedModel(geometry=geometry, weights=weights, metadata=doc.get("metadata"))


def load_model(path) -> LoadedModel:
    raw = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ModelFormatError(f"{path}: top level must be a JSON object")
    return parse_model_document(doc)


# ---------------------------------------------------------------------------
# weight range-spec grammar: "START-END:VALUE,...,default:VALUE"
# 1-based inclusive index ranges, later entries win on overlap.


def parse_range_spec(text: str, n: int, base: np.ndarray | None = None) -> np.ndarray:
    """Resolve a range-spec into a full weight vector of length n.

    Entries are comma-separated ``START-END:VALUE`` (1-based, inclusive; a
    bare ``INDEX:VALUE`` names a single point) or ``default:VALUE``.  Later
    entries override earlier ones.  Points not covered fall back to ``base``;
    with no base, full coverage is required.
    """
    if not text.strip():
        raise ValueError("empty weight range spec")
    weights = np.full(n, np.nan) if base is None else np.asarray(base, dtype=float).copy()
    if base is not None and weights.shape != (n,):
        raise ValueError(f"base weights must have length {n}")
    covered = np.zeros(n, dtype=bool)
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise ValueError(f"bad range entry {chunk!r}: expected 'START-END:VALUE' or 'default:VALUE'")
        sel, _, val_text = chunk.partition(":")
        sel = sel.strip()
        try:
            value = float(val_text)
        except ValueError:
            raise ValueError(f"bad weight value {val_text!r} in entry {chunk!r}") from None
        if sel.lower() == "default":
            weights[~covered] = value
            # default applies to currently uncovered points only; a later
            # explicit range may still override (last wins)
            continue
        if "-" in sel:
            lo_text, _, hi_text = sel.partition("-")
        else:
            lo_text = hi_text = sel
        try:
            lo, hi = int(lo_text), int(hi_text)
        except ValueError:
            raise ValueError(f"bad index range {sel!r} in entry {chunk!r}") from None
        if not (1 <= lo <= hi <= n):
            raise ValueError(f"range {sel!r} out of bounds for {n} points (1-based, inclusive)")
        weights[lo - 1: hi] = value
        covered[lo - 1: hi] = True
    if np.any(np.isnan(weights)):
        missing = int(np.sum(np.isnan(weights)))
        raise ValueError(
            f"{missing} points have no weight: add a 'default:VALUE' entry or cover all indices"
        )
    return weights
