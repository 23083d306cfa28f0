"""Tie-aware evaluation: thresholded labels, confusion taxonomy, ROC."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_labels


def threshold_label(values, tau: float):
    """Map rank differences to labels: 1 above tau, -1 below -tau, else 0.

    The boundary counts as a tie (|value| == tau gives 0).
    """
    if tau < 0:
        raise ValueError(f"threshold must be nonnegative, got {tau}")
    arr = np.asarray(values, dtype=np.float64)
    out = np.where(arr > tau, 1, np.where(arr < -tau, -1, 0)).astype(np.int64)
    if np.isscalar(values) or arr.ndim == 0:
        return int(out)
    return out


def midpoint_taus(values) -> np.ndarray:
    """Midpoints between consecutive distinct |values|, sorted ascending."""
    mags = np.unique(np.abs(np.asarray(values, dtype=np.float64)))
    if mags.size < 2:
        return np.empty(0)
    return (mags[:-1] + mags[1:]) / 2.0


def zero_one_loss(pred, y) -> float:
    y = check_labels(y)
    pred = check_labels(pred, y.shape[0])
    if y.size == 0:
        raise ValueError("zero-one loss of an empty set is undefined")
    return float(np.mean(pred != y))


@dataclass(frozen=True)
class ConfusionCounts:
    """Pair-prediction error taxonomy.

    false_positive: predicted a direction on a tie.
    false_negative: predicted a tie on a directed pair.
    inversion: predicted the opposite direction on a directed pair.
    """

    correct: int
    false_positive: int
    false_negative: int
    inversion: int

    @property
    def total(self) -> int:
        return self.correct + self.false_positive + self.false_negative + self.inversion


def confusion(pred, y) -> ConfusionCounts:
    y = check_labels(y)
    pred = check_labels(pred, y.shape[0])
    correct = np.count_nonzero(pred == y)
    fp = np.count_nonzero((y == 0) & (pred != 0))
    fn = np.count_nonzero((y != 0) & (pred == 0))
    inv = np.count_nonzero((y != 0) & (pred == -y))
    return ConfusionCounts(int(correct), int(fp), int(fn), int(inv))


@dataclass(frozen=True)
class RocCurve:
    """Operating points swept over the tie threshold, tau ascending."""

    taus: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray

    def __post_init__(self):
        for name in ("taus", "fpr", "tpr"):
            arr = np.ascontiguousarray(np.asarray(getattr(self, name), dtype=np.float64))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def roc_curve(rank_diffs, y) -> RocCurve:
    """ROC of the tie threshold: FPR on ties, TPR on directed pairs.

    A false positive is any nonzero prediction on a tie; a false
    negative is a tie prediction on a directed pair.  Inversions count
    against neither rate.  Thresholds are 0, the midpoints between
    consecutive distinct |rank_diffs|, and infinity.
    """
    y = check_labels(y)
    diffs = np.asarray(rank_diffs, dtype=np.float64)
    if diffs.shape != y.shape:
        raise ValueError("rank_diffs must align with labels")
    n_tie = int(np.count_nonzero(y == 0))
    n_dir = int(np.count_nonzero(y != 0))
    if n_tie == 0:
        raise ValueError("ROC requires at least one equality pair")
    if n_dir == 0:
        raise ValueError("ROC requires at least one inequality pair")
    taus = np.concatenate([[0.0], midpoint_taus(diffs), [np.inf]])
    fpr = np.empty(taus.size)
    tpr = np.empty(taus.size)
    tie_mags = np.abs(diffs[y == 0])
    dir_mags = np.abs(diffs[y != 0])
    for k, tau in enumerate(taus):
        fpr[k] = np.count_nonzero(tie_mags > tau) / n_tie
        tpr[k] = np.count_nonzero(dir_mags > tau) / n_dir
    return RocCurve(taus, fpr, tpr)


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under the curve, traversed from (0,0) to (1,1).

    FPR is non-increasing in tau, so the reversed arrays walk the curve
    with ascending FPR.
    """
    return float(np.trapezoid(curve.tpr[::-1], curve.fpr[::-1]))
