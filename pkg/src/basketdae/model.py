"""Trained model bundle and its on-disk format.

The model document is JSON with a format_version field.  Parameter and
support values are written as decimal strings with 17 significant digits,
which round-trips float64 exactly, so save -> load -> save is byte-identical.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from .data import ItemCatalog, SupportProfile
from .errors import ConfigError, ModelFormatError
from .network import DaeParams

__all__ = ["FORMAT_VERSION", "DaeModel", "save_model", "load_model"]

FORMAT_VERSION = 1


@dataclass(eq=False)
class DaeModel:
    params: DaeParams
    catalog: ItemCatalog
    supports: SupportProfile
    eta: float = 0.5

    def __post_init__(self):
        if self.catalog.p != self.params.p or self.supports.p != self.params.p:
            raise ValueError(
                f"dimension mismatch: params p={self.params.p}, "
                f"catalog p={self.catalog.p}, supports p={self.supports.p}"
            )
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")

    @property
    def p(self):
        return self.params.p

    @property
    def n_hidden(self):
        return self.params.n_hidden


def _fmt(value):
    return format(float(value), ".17g")


def _encode(arr):
    if arr.ndim == 1:
        return [_fmt(v) for v in arr]
    return [[_fmt(v) for v in row] for row in arr]


def _decode(field, rows, shape):
    try:
        arr = np.array(rows, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(
            f"field {field!r}: dimension mismatch or unparsable values ({exc})"
        ) from exc
    if arr.shape != shape:
        raise ModelFormatError(
            f"field {field!r}: dimension mismatch, expected {shape}, got {arr.shape}"
        )
    if not np.isfinite(arr).all():
        raise ModelFormatError(f"field {field!r}: non-finite value")
    return arr


def save_model(model, path):
    doc = {
        "format_version": FORMAT_VERSION,
        "p": model.p,
        "n_hidden": model.n_hidden,
        "item_labels": list(model.catalog.names),
        "eta": float(model.eta),
        "supports": _encode(model.supports.pi),
        "w_in": _encode(model.params.w_in),
        "b_in": _encode(model.params.b_in),
        "w_out": _encode(model.params.w_out),
        "b_out": _encode(model.params.b_out),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_model(path):
    if not os.path.exists(path):
        raise ConfigError(f"model file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"truncated or invalid model file: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported format_version {version!r}; this build reads {FORMAT_VERSION}"
        )
    for key in ("p", "n_hidden", "item_labels", "eta",
                "supports", "w_in", "b_in", "w_out", "b_out"):
        if key not in doc:
            raise ModelFormatError(f"missing field {key!r}")
    p, n = doc["p"], doc["n_hidden"]
    if not (isinstance(p, int) and isinstance(n, int) and p >= 1 and n >= 1):
        raise ModelFormatError(f"bad dimensions p={p!r}, n_hidden={n!r}")
    labels = doc["item_labels"]
    if not isinstance(labels, list) or len(labels) != p:
        raise ModelFormatError(f"item_labels: dimension mismatch, expected {p} labels")
    params = DaeParams(
        _decode("w_in", doc["w_in"], (n, p)),
        _decode("b_in", doc["b_in"], (n,)),
        _decode("w_out", doc["w_out"], (p, n)),
        _decode("b_out", doc["b_out"], (p,)),
    )
    supports = _decode("supports", doc["supports"], (p,))
    try:
        model = DaeModel(params, ItemCatalog(tuple(labels)),
                         SupportProfile(supports), float(doc["eta"]))
    except Exception as exc:
        raise ModelFormatError(f"inconsistent model document: {exc}") from exc
    return model
