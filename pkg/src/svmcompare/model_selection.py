"""Validation-set model selection over the cost / kernel-width grid."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .estimators import SVMCompare, SVMRank, SVMRank2
from .metrics import auc, roc_curve, zero_one_loss
from .pairs import PairDataset

ALGORITHMS = {"compare": SVMCompare, "rank": SVMRank, "rank2": SVMRank2}
METRICS = ("zero_one", "auc")

DEFAULT_C_GRID = tuple(np.logspace(-3.0, 3.0, 10))
DEFAULT_GAMMA_GRID = tuple(2.0 ** np.linspace(-7.0, 4.0, 10))


@dataclass
class GridCell:
    """One (C, gamma) evaluation; error holds the failure message if any."""

    C: float
    gamma: float | None
    val_zero_one: float | None = None
    val_auc: float | None = None
    error: str | None = None
    selected: bool = False


@dataclass
class GridSearchResult:
    model: object
    best_cell: GridCell
    cells: list[GridCell] = field(default_factory=list)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["C", "gamma", "val_zero_one", "val_auc", "error", "selected"])
            for cell in self.cells:
                writer.writerow(
                    [
                        repr(float(cell.C)),
                        "" if cell.gamma is None else repr(float(cell.gamma)),
                        "" if cell.val_zero_one is None else repr(cell.val_zero_one),
                        "" if cell.val_auc is None else repr(cell.val_auc),
                        cell.error or "",
                        int(cell.selected),
                    ]
                )


def _cell_scores(model, val: PairDataset) -> tuple[float, float | None]:
    pred = model.predict(val.x, val.x_prime)
    err = zero_one_loss(pred, val.y)
    val_auc = None
    if val.count(0) and val.count(0) < val.n:
        diffs = model.rank_diffs(val.x, val.x_prime)
        val_auc = auc(roc_curve(diffs, val.y))
    return err, val_auc


def grid_search(
    train: PairDataset,
    val: PairDataset,
    algorithm: str = "compare",
    metric: str = "zero_one",
    *,
    kernel: str = "gaussian",
    c_grid=None,
    gamma_grid=None,
    scale: bool = True,
    tol: float = 1e-3,
    max_iter: int = 200_000,
) -> GridSearchResult:
    """Fit the full grid, score on the validation pairs, keep the best.

    ``metric`` is minimized zero-one loss or maximized ROC area; score
    ties go to the smaller C, then the smaller gamma.  Cells whose fit
    or scoring raises are recorded with the message and skipped.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    if metric == "auc" and (val.count(0) == 0 or val.count(0) == val.n):
        raise ValueError(
            "AUC selection requires both equality and inequality validation pairs"
        )
    cls = ALGORITHMS[algorithm]
    c_values = [float(c) for c in (DEFAULT_C_GRID if c_grid is None else c_grid)]
    if kernel == "linear":
        gamma_values = [None]
    else:
        gamma_values = [
            float(g) for g in (DEFAULT_GAMMA_GRID if gamma_grid is None else gamma_grid)
        ]
    cells: list[GridCell] = []
    fitted: list[object] = []
    for gamma in gamma_values:
        for c in c_values:
            cell = GridCell(C=c, gamma=gamma)
            cells.append(cell)
            params = dict(C=c, kernel=kernel, scale=scale, tol=tol, max_iter=max_iter)
            if gamma is not None:
                params["gamma"] = gamma
            try:
                model = cls(**params).fit(train.x, train.x_prime, train.y)
                cell.val_zero_one, cell.val_auc = _cell_scores(model, val)
            except Exception as exc:  # noqa: BLE001 - cell failures are data
                cell.error = f"{type(exc).__name__}: {exc}"
                fitted.append(None)
                continue
            fitted.append(model)

    def sort_key(idx: int):
        cell = cells[idx]
        if metric == "zero_one":
            score = cell.val_zero_one
        else:
            score = None if cell.val_auc is None else -cell.val_auc
        return (score, cell.C, cell.gamma if cell.gamma is not None else 0.0)

    usable = [
        k
        for k, cell in enumerate(cells)
        if cell.error is None and sort_key(k)[0] is not None
    ]
    if not usable:
        raise RuntimeError("all grid cells failed")
    best_idx = min(usable, key=sort_key)
    best_cell = cells[best_idx]
    best_cell.selected = True
    model = fitted[best_idx]
    model.grid_cell_ = {"C": best_cell.C, "gamma": best_cell.gamma}
    return GridSearchResult(model=model, best_cell=best_cell, cells=cells)
