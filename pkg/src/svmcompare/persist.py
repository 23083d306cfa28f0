"""Versioned JSON container for trained models with exact round-trips."""

from __future__ import annotations

import json

import numpy as np

from .estimators import SVMCompare, SVMRank, SVMRank2
from .pairs import Scaler

FORMAT = "svmcompare-model"
VERSION = 1

_TAGS = {SVMCompare: "compare", SVMRank: "rank", SVMRank2: "rank2"}
_CLASSES = {tag: cls for cls, tag in _TAGS.items()}

_ARRAY_ATTRS = ("sv_x_", "sv_x_prime_", "sv_y_", "sv_v_", "sv_indices_")
_SCALAR_ATTRS = (
    "p_",
    "m_",
    "objective_",
    "kkt_violation_",
    "iterations_",
    "converged_",
)


def model_tag(model) -> str:
    tag = _TAGS.get(type(model))
    if tag is None:
        raise TypeError(f"not a persistable model: {type(model).__name__}")
    return tag


def save_model(model, path) -> None:
    """Serialize a fitted estimator; floats survive exactly via JSON repr."""
    tag = _TAGS.get(type(model))
    if tag is None:
        raise TypeError(f"cannot persist {type(model).__name__}")
    if not hasattr(model, "sv_v_"):
        raise ValueError("cannot persist an unfitted model")
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "model": tag,
        "params": model.get_params(),
        "arrays": {name: getattr(model, name).tolist() for name in _ARRAY_ATTRS},
        "scalars": {name: getattr(model, name) for name in _SCALAR_ATTRS},
    }
    if model.scaler_ is not None:
        doc["scaler"] = {
            "mean": model.scaler_.mean.tolist(),
            "scale": model.scaler_.scale.tolist(),
            "constant_mask": model.scaler_.constant_mask.tolist(),
        }
    else:
        doc["scaler"] = None
    if tag == "compare":
        doc["beta"] = model.beta_
    else:
        doc["tau_hat"] = model.tau_hat_
    if hasattr(model, "grid_cell_"):
        doc["grid_cell"] = model.grid_cell_
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, default=_np_scalar)
        fh.write("\n")


def _np_scalar(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def load_model(path):
    """Rebuild an estimator saved by :func:`save_model`."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not a model file: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise ValueError(f"{path}: not a {FORMAT} file")
    if doc.get("version") != VERSION:
        raise ValueError(f"{path}: unsupported version {doc.get('version')!r}")
    cls = _CLASSES.get(doc.get("model"))
    if cls is None:
        raise ValueError(f"{path}: unknown model kind {doc.get('model')!r}")
    model = cls(**doc["params"])
    p = int(doc["scalars"]["p_"])
    arrays = doc["arrays"]
    model.sv_x_ = np.asarray(arrays["sv_x_"], dtype=np.float64).reshape(-1, p)
    model.sv_x_prime_ = np.asarray(arrays["sv_x_prime_"], dtype=np.float64).reshape(-1, p)
    model.sv_y_ = np.asarray(arrays["sv_y_"], dtype=np.int64)
    model.sv_v_ = np.asarray(arrays["sv_v_"], dtype=np.float64)
    model.sv_indices_ = np.asarray(arrays["sv_indices_"], dtype=np.int64)
    for name in _SCALAR_ATTRS:
        setattr(model, name, doc["scalars"][name])
    model.p_ = int(model.p_)
    model.m_ = int(model.m_)
    model.n_features_in_ = model.p_
    if doc["scaler"] is not None:
        model.scaler_ = Scaler(
            np.asarray(doc["scaler"]["mean"], dtype=np.float64),
            np.asarray(doc["scaler"]["scale"], dtype=np.float64),
            np.asarray(doc["scaler"]["constant_mask"], dtype=bool),
        )
    else:
        model.scaler_ = None
    if doc["model"] == "compare":
        model.beta_ = float(doc["beta"])
    else:
        model.tau_hat_ = float(doc["tau_hat"])
    if "grid_cell" in doc:
        model.grid_cell_ = doc["grid_cell"]
    return model
