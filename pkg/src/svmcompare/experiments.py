"""Experiment drivers: simulation studies, pooled-data benchmarks, and
the feasibility check that ties the hard-margin dual to the margin LP.

All drivers are deterministic given their seeds and append rows to
schema-versioned CSV files; they also return the rows for callers that
skip the file.
"""

from __future__ import annotations

import csv
import logging
import os
from dataclasses import dataclass

import numpy as np

from .lp import check_lp_feasible, hard_margin_direction, lemma1_map, solve_max_margin_lp
from .metrics import auc, confusion, roc_curve, zero_one_loss
from .model_selection import grid_search
from .pairs import PairDataset, apply_scaler, fit_scaler, sample_disjoint
from .simulate import LOW, HIGH, SimSpec, simulate_dataset

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
RESULT_FIELDS = (
    "schema_version",
    "pattern",
    "algorithm",
    "n",
    "rho",
    "seed",
    "stat",
    "test_zero_one",
    "test_auc",
)
_PATTERN_IDS = {"norm1": 1, "norm2": 2, "norminf": 3}
_ROLE_IDS = {"train": 1, "val": 2, "test": 3}

DEFAULT_N_LIST = (50, 100, 200, 400, 800)
DEFAULT_RHO_LIST = (0.1, 0.3, 0.5, 0.7, 0.9)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def append_csv(path, fieldnames, rows) -> None:
    """Append dict rows; the header is written once and must match later."""
    fieldnames = list(fieldnames)
    exists = os.path.exists(path) and os.path.getsize(path) > 0
    if exists:
        with open(path, newline="") as fh:
            header = next(csv.reader(fh), None)
        if header != fieldnames:
            raise ValueError(f"{path}: existing header does not match {fieldnames}")
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if not exists:
            writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row.get(name)) for name in fieldnames])


def evaluate_model(model, d: PairDataset) -> dict:
    """Test-set scores for a fitted model: zero-one, AUC, error taxonomy."""
    pred = model.predict(d.x, d.x_prime)
    counts = confusion(pred, d.y)
    out = {
        "zero_one": zero_one_loss(pred, d.y),
        "auc": None,
        "fp": counts.false_positive,
        "fn": counts.false_negative,
        "inversions": counts.inversion,
    }
    if 0 < d.count(0) < d.n:
        out["auc"] = auc(roc_curve(model.rank_diffs(d.x, d.x_prime), d.y))
    return out


def _sim_splits(pattern: str, n: int, rho: float, base_seed: int, exp_id: int, rep: int):
    out = []
    for role in ("train", "val", "test"):
        seed = [base_seed, exp_id, _PATTERN_IDS[pattern], n, int(round(rho * 1000)), rep, _ROLE_IDS[role]]
        out.append(simulate_dataset(SimSpec(pattern, n, rho, seed=seed)))
    return tuple(out)


def _aggregate(rows, keys) -> list[dict]:
    agg = []
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault(tuple(row[k] for k in keys), []).append(row)
    for key, members in groups.items():
        for stat in ("mean", "sd"):
            out = {k: v for k, v in zip(keys, key)}
            out.update(schema_version=SCHEMA_VERSION, seed=None, stat=stat)
            for field in ("test_zero_one", "test_auc"):
                vals = [r[field] for r in members if r[field] is not None]
                if not vals:
                    out[field] = None
                elif stat == "mean":
                    out[field] = float(np.mean(vals))
                else:
                    out[field] = float(np.std(vals, ddof=1)) if len(vals) > 1 else None
            agg.append(out)
    return agg


def _run_sim_experiment(
    patterns,
    n_rho_pairs,
    seeds,
    metric,
    out,
    *,
    exp_id,
    base_seed,
    algorithms,
    kernel,
    c_grid,
    gamma_grid,
    tol,
    max_iter,
) -> list[dict]:
    rows: list[dict] = []
    for pattern in patterns:
        if pattern not in _PATTERN_IDS:
            raise ValueError(f"unknown pattern {pattern!r}")
        for n, rho in n_rho_pairs:
            for rep in range(seeds):
                train, val, test = _sim_splits(pattern, n, rho, base_seed, exp_id, rep)
                for algorithm in algorithms:
                    result = grid_search(
                        train,
                        val,
                        algorithm,
                        metric,
                        kernel=kernel,
                        c_grid=c_grid,
                        gamma_grid=gamma_grid,
                        tol=tol,
                        max_iter=max_iter,
                    )
                    scores = evaluate_model(result.model, test)
                    row = {
                        "schema_version": SCHEMA_VERSION,
                        "pattern": pattern,
                        "algorithm": algorithm,
                        "n": n,
                        "rho": rho,
                        "seed": rep,
                        "stat": "run",
                        "test_zero_one": scores["zero_one"],
                        "test_auc": scores["auc"],
                    }
                    rows.append(row)
                    log.info(
                        "%s n=%d rho=%.2f rep=%d %s: zero_one=%.4f auc=%s",
                        pattern,
                        n,
                        rho,
                        rep,
                        algorithm,
                        scores["zero_one"],
                        "-" if scores["auc"] is None else f"{scores['auc']:.4f}",
                    )
    all_rows = rows + _aggregate(rows, ("pattern", "algorithm", "n", "rho"))
    if out is not None:
        append_csv(out, RESULT_FIELDS, all_rows)
    return all_rows


def run_error_vs_n(
    patterns=("norm1", "norm2", "norminf"),
    n_list=DEFAULT_N_LIST,
    rho: float = 0.5,
    seeds: int = 4,
    out=None,
    *,
    base_seed: int = 0,
    algorithms=("compare", "rank", "rank2"),
    kernel: str = "gaussian",
    c_grid=None,
    gamma_grid=None,
    tol: float = 1e-3,
    max_iter: int = 200_000,
) -> list[dict]:
    """Test error versus training size, one fresh train/val/test per seed."""
    return _run_sim_experiment(
        patterns,
        [(int(n), float(rho)) for n in n_list],
        seeds,
        "zero_one",
        out,
        exp_id=101,
        base_seed=base_seed,
        algorithms=algorithms,
        kernel=kernel,
        c_grid=c_grid,
        gamma_grid=gamma_grid,
        tol=tol,
        max_iter=max_iter,
    )


def run_auc_vs_rho(
    patterns=("norm1", "norm2", "norminf"),
    rho_list=DEFAULT_RHO_LIST,
    n: int = 400,
    seeds: int = 4,
    out=None,
    *,
    base_seed: int = 0,
    algorithms=("compare", "rank", "rank2"),
    kernel: str = "gaussian",
    c_grid=None,
    gamma_grid=None,
    tol: float = 1e-3,
    max_iter: int = 200_000,
) -> list[dict]:
    """Test AUC versus the tie proportion, selecting models by AUC."""
    return _run_sim_experiment(
        patterns,
        [(int(n), float(rho)) for rho in rho_list],
        seeds,
        "auc",
        out,
        exp_id=102,
        base_seed=base_seed,
        algorithms=algorithms,
        kernel=kernel,
        c_grid=c_grid,
        gamma_grid=gamma_grid,
        tol=tol,
        max_iter=max_iter,
    )


def pool_benchmark(
    pool: PairDataset,
    n: int,
    rho: float,
    seeds: int = 4,
    out=None,
    *,
    base_seed: int = 0,
    algorithms=("compare", "rank", "rank2"),
    metric: str = "zero_one",
    kernel: str = "gaussian",
    c_grid=None,
    gamma_grid=None,
    tol: float = 1e-3,
    max_iter: int = 200_000,
) -> list[dict]:
    """Benchmark on disjoint samples drawn from a fixed pool of pairs."""
    rows: list[dict] = []
    for rep in range(seeds):
        train, val, test = sample_disjoint(pool, n, rho, [base_seed, 103, rep], parts=3)
        for algorithm in algorithms:
            result = grid_search(
                train,
                val,
                algorithm,
                metric,
                kernel=kernel,
                c_grid=c_grid,
                gamma_grid=gamma_grid,
                tol=tol,
                max_iter=max_iter,
            )
            scores = evaluate_model(result.model, test)
            rows.append(
                {
                    "schema_version": SCHEMA_VERSION,
                    "pattern": "pool",
                    "algorithm": algorithm,
                    "n": n,
                    "rho": rho,
                    "seed": rep,
                    "stat": "run",
                    "test_zero_one": scores["zero_one"],
                    "test_auc": scores["auc"],
                }
            )
            log.info(
                "pool n=%d rho=%.2f rep=%d %s: zero_one=%.4f",
                n,
                rho,
                rep,
                algorithm,
                scores["zero_one"],
            )
    all_rows = rows + _aggregate(rows, ("pattern", "algorithm", "n", "rho"))
    if out is not None:
        append_csv(out, RESULT_FIELDS, all_rows)
    return all_rows


def separable_dataset(rng: np.random.Generator, n_max: int = 20, p: int = 2) -> PairDataset:
    """Random linearly separable pairs whose margin direction is well pinned.

    A hidden unit direction scores each difference: tie differences score
    within +-[0.75, 0.8], directed pairs within +-[1.2, 1.25], so a unit
    band always separates the two groups.  Differences are built directly
    as score * direction plus cross-direction scatter; the concentrated
    bands and the scatter together leave little slack in the separating
    direction, keeping the margin problem well determined rather than
    degenerate.
    """
    n = int(rng.integers(max(4, n_max - 4), n_max + 1))
    n_tie = int(rng.integers(max(2, n // 3), max(3, 2 * n // 3) + 1))
    w = rng.normal(size=p)
    w /= np.linalg.norm(w)
    rows = []
    for i in range(n):
        tie = i < n_tie
        lo, hi = (0.75, 0.8) if tie else (1.2, 1.25)
        s = rng.uniform(lo, hi) * rng.choice([-1.0, 1.0])
        scatter = rng.normal(0.0, 1.0, size=p)
        scatter -= (scatter @ w) * w
        x = rng.uniform(LOW, HIGH, size=p)
        x_prime = x + s * w + scatter
        rows.append((x, x_prime, 0 if tie else (1 if s > 0 else -1)))
    order = rng.permutation(n)
    return PairDataset(
        np.vstack([rows[i][0] for i in order]),
        np.vstack([rows[i][1] for i in order]),
        np.array([rows[i][2] for i in order], dtype=np.int64),
    )


LP_CHECK_FIELDS = ("trial", "lp_mu", "mapped_mu", "feasibility_violation")


def lemma_feasibility_trials(
    n_trials: int,
    seed=0,
    out=None,
    *,
    n_max: int = 20,
    c: float = 1e6,
    tol: float = 1e-8,
) -> list[dict]:
    """Hard-margin dual solutions mapped into the margin LP, per trial.

    Each trial standardizes a random separable dataset, solves the
    near-hard-margin dual, maps (direction, bias) to (w, mu), and
    records the LP optimum next to the mapped margin and the constraint
    violation of the mapped point (feasible when <= 0).
    """
    rng = np.random.default_rng(seed)
    rows = []
    for trial in range(n_trials):
        d = separable_dataset(rng, n_max=n_max)
        ds = apply_scaler(fit_scaler(d), d)
        u, beta, _sol = hard_margin_direction(ds, c=c, tol=tol)
        w_hat, mu_hat = lemma1_map(u, beta)
        rows.append(
            {
                "trial": trial,
                "lp_mu": solve_max_margin_lp(ds).mu,
                "mapped_mu": mu_hat,
                "feasibility_violation": check_lp_feasible(w_hat, mu_hat, ds),
            }
        )
    if out is not None:
        append_csv(out, LP_CHECK_FIELDS, rows)
    return rows


def export_level_curves(model, resolution: int = 101, out=None) -> np.ndarray:
    """Rank values of a 2-d model on the square lattice, as (x1, x2, rank)."""
    if getattr(model, "p_", None) != 2:
        raise ValueError("level curves require a model over 2-d features")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    lin = np.linspace(LOW, HIGH, resolution)
    g1, g2 = np.meshgrid(lin, lin, indexing="ij")
    points = np.column_stack([g1.ravel(), g2.ravel()])
    ranks = model.rank(points)
    table = np.column_stack([points, ranks])
    if out is not None:
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x1", "x2", "rank"])
            for row in table:
                writer.writerow([repr(float(v)) for v in row])
    return table
