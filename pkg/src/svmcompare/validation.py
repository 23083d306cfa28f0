"""Input validation helpers shared by datasets and estimators."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

VALID_LABELS = (-1, 0, 1)


def check_feature_matrix(x, *, name: str = "X", allow_empty: bool = False) -> np.ndarray:
    """Coerce to a finite 2-d float64 array."""
    try:
        return check_array(
            x,
            dtype=np.float64,
            ensure_2d=True,
            ensure_all_finite=True,
            ensure_min_samples=0 if allow_empty else 1,
        )
    except Exception as exc:
        raise ValueError(f"invalid feature matrix {name}: {exc}") from exc


def check_labels(y, n: int | None = None) -> np.ndarray:
    """Coerce comparison labels to int64 values in {-1, 0, 1}."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"labels must be 1-d, got shape {y.shape}")
    if y.size and not np.all(np.isin(y, VALID_LABELS)):
        bad = y[~np.isin(y, VALID_LABELS)][0]
        raise ValueError(f"labels must be in {{-1, 0, 1}}, got {bad!r}")
    if n is not None and y.shape[0] != n:
        raise ValueError(f"expected {n} labels, got {y.shape[0]}")
    return y.astype(np.int64)


def check_pair_arrays(x, x_prime, y=None, *, allow_empty: bool = False):
    """Validate a batch of comparison pairs; returns float64/int64 arrays."""
    x = check_feature_matrix(x, name="X", allow_empty=allow_empty)
    x_prime = check_feature_matrix(x_prime, name="X_prime", allow_empty=allow_empty)
    if x.shape != x_prime.shape:
        raise ValueError(
            f"X and X_prime must have the same shape, got {x.shape} vs {x_prime.shape}"
        )
    if y is None:
        return x, x_prime
    return x, x_prime, check_labels(y, x.shape[0])
