"""Reading UCR-style delimited datasets and persisting models as JSON.

Every float is serialised through Python's shortest round-trip repr, so
load(save(x)) is bit-exact for all finite values.
"""

from __future__ import annotations

import json
import os
from typing import Any

import numpy as np

from .classify import LabeledDataset
from .core import AffineModel, RationalActivation
from .errors import DataError, ParseError, SchemaError

MODEL_SCHEMA_VERSION = 1


def _detect_delimiter(line: str, delimiter: str) -> str | None:
    if delimiter == "tab":
        return "\t"
    if delimiter == "comma":
        return ","
    if delimiter == "auto":
        if "\t" in line:
            return "\t"
        if "," in line:
            return ","
        return None  # any-whitespace split
    raise DataError(f"delimiter must be auto, tab, or comma, got {delimiter!r}")


def _parse_label(token: str):
    """Labels are integers where possible ("1", "1.0", "1e0"), else strings."""
    token = token.strip()
    try:
        return int(token)
    except ValueError:
        pass
    try:
        value = float(token)
    except ValueError:
        return token
    return int(value) if value.is_integer() else value


def load_ucr(path: str, delimiter: str = "auto",
             znorm: bool = False) -> LabeledDataset:
    """Parse label-first delimited rows into a two-class labeled dataset.

    ``znorm`` applies per-series standardisation (mean 0, variance 1 along
    each row); it defaults off and is recorded in the provenance when used.
    """
    if not os.path.exists(path):
        raise DataError(f"dataset file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        raw_lines = fh.read().splitlines()
    lines = [(i + 1, ln) for i, ln in enumerate(raw_lines) if ln.strip()]
    if not lines:
        raise ParseError(f"{path} contains no data rows")

    sep = _detect_delimiter(lines[0][1], delimiter)
    labels: list = []
    rows: list[list[float]] = []
    width = None
    for lineno, line in lines:
        tokens = [t for t in line.split(sep) if t.strip() != ""]
        if len(tokens) < 2:
            raise ParseError("row needs a label and at least one feature",
                             row=lineno)
        labels.append(_parse_label(tokens[0]))
        values = []
        for col, tok in enumerate(tokens[1:], start=2):
            try:
                values.append(float(tok))
            except ValueError:
                raise ParseError(f"could not parse {tok!r} as a number",
                                 row=lineno, col=col) from None
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise DataError(f"row {lineno} has {len(values)} features, "
                            f"expected {width}")
        rows.append(values)

    X = np.asarray(rows, dtype=float)
    provenance = f"ucr:{os.path.basename(path)}"
    if znorm:
        mean = X.mean(axis=1, keepdims=True)
        std = X.std(axis=1, keepdims=True)
        X = (X - mean) / np.where(std == 0.0, 1.0, std)
        provenance += "|znorm"
    return LabeledDataset.from_arrays(X, labels, provenance=provenance)


# ---------------------------------------------------------------------------
# Model persistence
# ---------------------------------------------------------------------------

def save_model(path: str, act: RationalActivation, model: AffineModel,
               meta: dict | None = None) -> None:
    """Write the versioned model JSON document.

    meta may carry label_map (ordered [label, target] pairs), trainer settings,
    the training deviation, and any other JSON-encodable annotations.
    """
    meta = dict(meta or {})
    doc: dict[str, Any] = {
        "version": MODEL_SCHEMA_VERSION,
        "activation": {"a0": act.a0, "a1": act.a1, "b0": act.b0, "b1": act.b1},
        "weights": [float(w) for w in model.weights],
        "bias": float(model.bias),
        "label_map": meta.pop("label_map", None),
        "trainer": meta.pop("trainer", None),
        "deviation": meta.pop("deviation", None),
    }
    doc.update(meta)
    dump_json(path, doc)


def load_model(path: str) -> tuple[RationalActivation, AffineModel, dict]:
    """Read a model JSON document back; SchemaError on any shape problem."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"model file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected a JSON object at top level")
    if doc.get("version") != MODEL_SCHEMA_VERSION:
        raise SchemaError(f"{path}: unsupported schema version "
                          f"{doc.get('version')!r}")
    try:
        a = doc["activation"]
        act = RationalActivation(float(a["a0"]), float(a["a1"]),
                                 float(a["b0"]), float(a["b1"]))
        model = AffineModel(np.asarray(doc["weights"], dtype=float),
                            float(doc["bias"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: malformed model document ({exc})") from None
    meta = {k: v for k, v in doc.items()
            if k not in ("version", "activation", "weights", "bias")}
    return act, model, meta


def dump_json(path: str, obj: Any) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def label_map_pairs(classes: tuple) -> list[list]:
    """label_map entry of the model schema: ordered [label, target] pairs."""
    return [[classes[0], 0.0], [classes[1], 1.0]]


def classes_from_label_map(label_map) -> tuple:
    try:
        (la, ta), (lb, tb) = label_map
    except (TypeError, ValueError):
        raise SchemaError(f"malformed label_map: {label_map!r}") from None
    if (ta, tb) != (0.0, 1.0):
        raise SchemaError(f"label_map targets must be (0.0, 1.0), got {(ta, tb)}")
    return la, lb
