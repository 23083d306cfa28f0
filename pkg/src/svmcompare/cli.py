"""Command line interface for simulation, training, evaluation and exports."""

from __future__ import annotations

import json
import logging
from functools import wraps

import click

from .experiments import (
    DEFAULT_N_LIST,
    DEFAULT_RHO_LIST,
    append_csv,
    evaluate_model,
    export_level_curves,
    lemma_feasibility_trials,
    run_auc_vs_rho,
    run_error_vs_n,
)
from .model_selection import ALGORITHMS, grid_search
from .pairs import read_pairs_csv, write_pairs_csv
from .persist import load_model, model_tag, save_model
from .simulate import RANK_PATTERNS, SimSpec, simulate_dataset
from .sushi import build_pairs, find_dataset, parse_sushi_tables

EVAL_FIELDS = ("model", "n", "rho", "seed", "zero_one", "auc", "fp", "fn", "inversions")


def _friendly(fn):
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, FileNotFoundError, RuntimeError) as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _load_config(path) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise click.ClickException(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise click.ClickException(f"{path}: config must be a JSON object")
    return cfg


def _pick(cfg: dict, key: str, flag_value, default):
    if flag_value is not None:
        return flag_value
    return cfg.get(key, default)


def _int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).replace(",", " ").split()]


def _float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(",", " ").split()]


def _grids(cfg: dict) -> dict:
    out = {}
    if "c_grid" in cfg:
        out["c_grid"] = _float_list(cfg["c_grid"])
    if "gamma_grid" in cfg:
        out["gamma_grid"] = _float_list(cfg["gamma_grid"])
    return out


@click.group()
@click.version_option(package_name="svmcompare")
def main():
    """Max-margin learning to compare, with tie-aware evaluation."""
    logging.basicConfig(level=logging.INFO, format="%(message)s")


@main.command()
@click.option("--pattern", type=click.Choice(sorted(RANK_PATTERNS)), default="norm2", show_default=True)
@click.option("--n", type=int, default=100, show_default=True)
@click.option("--rho", type=float, default=0.5, show_default=True)
@click.option("--sigma", type=float, default=0.25, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@_friendly
def simulate(pattern, n, rho, sigma, seed, out):
    """Generate synthetic comparison pairs as CSV."""
    d = simulate_dataset(SimSpec(pattern, n, rho, sigma, seed))
    write_pairs_csv(d, out)
    click.echo(f"wrote {d.n} pairs ({d.count(0)} ties) to {out}")


@main.command()
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--algorithm", type=click.Choice(sorted(ALGORITHMS)), default="compare", show_default=True)
@click.option("--kernel", type=click.Choice(["linear", "gaussian"]), default="linear", show_default=True)
@click.option("--cost", "-c", type=float, default=1.0, show_default=True, help="Box constraint C.")
@click.option("--gamma", type=float, default=1.0, show_default=True, help="Gaussian kernel width.")
@click.option("--no-scale", is_flag=True, help="Skip feature standardization.")
@click.option("--tol", type=float, default=1e-3, show_default=True)
@click.option("--max-iter", type=int, default=10_000_000, show_default=True)
@click.option("--val", "val_path", type=click.Path(exists=True, dir_okay=False), help="Validation pairs; triggers grid selection of C (and gamma).")
@click.option("--metric", type=click.Choice(["zero_one", "auc"]), default="zero_one", show_default=True, help="Grid selection metric (with --val).")
@click.option("--grid-report", type=click.Path(dir_okay=False), help="Where to write the per-cell grid report (with --val).")
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Model file to write.")
@_friendly
def train(pairs_path, algorithm, kernel, cost, gamma, no_scale, tol, max_iter, val_path, metric, grid_report, out):
    """Train a model on labeled pairs and save it as JSON."""
    d = read_pairs_csv(pairs_path)
    if val_path:
        result = grid_search(
            d,
            read_pairs_csv(val_path),
            algorithm,
            metric,
            kernel=kernel,
            scale=not no_scale,
            tol=tol,
            max_iter=max_iter,
        )
        model = result.model
        if grid_report:
            result.write_csv(grid_report)
        click.echo(
            f"selected C={result.best_cell.C:g}"
            + (f" gamma={result.best_cell.gamma:g}" if result.best_cell.gamma else "")
        )
    else:
        params = dict(C=cost, kernel=kernel, scale=not no_scale, tol=tol, max_iter=max_iter)
        if kernel == "gaussian":
            params["gamma"] = gamma
        model = ALGORITHMS[algorithm](**params).fit(d.x, d.x_prime, d.y)
    save_model(model, out)
    note = "" if model.converged_ else " (not converged)"
    click.echo(f"trained {algorithm} on {d.n} pairs: {model.sv_v_.size} support vectors{note}; saved to {out}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--tau", type=float, default=None, help="Override the tie threshold.")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@_friendly
def predict(model_path, pairs_path, tau, out):
    """Predict labels for pairs; writes row, rank_diff, prediction."""
    model = load_model(model_path)
    d = read_pairs_csv(pairs_path)
    diffs = model.rank_diffs(d.x, d.x_prime)
    pred = model.predict(d.x, d.x_prime) if tau is None else model.predict(d.x, d.x_prime, tau)
    with open(out, "w", newline="") as fh:
        fh.write("row,rank_diff,prediction\n")
        for i in range(d.n):
            fh.write(f"{i},{diffs[i]!r},{pred[i]}\n")
    click.echo(f"wrote {d.n} predictions to {out}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=0, show_default=True, help="Recorded in the report row.")
@click.option("--out", type=click.Path(dir_okay=False), help="Report CSV to append to.")
@_friendly
def evaluate(model_path, pairs_path, seed, out):
    """Score a model on labeled pairs (zero-one, AUC, error taxonomy)."""
    model = load_model(model_path)
    d = read_pairs_csv(pairs_path)
    scores = evaluate_model(model, d)
    row = {
        "model": model_tag(model),
        "n": d.n,
        "rho": d.tie_fraction(),
        "seed": seed,
        "zero_one": scores["zero_one"],
        "auc": scores["auc"],
        "fp": scores["fp"],
        "fn": scores["fn"],
        "inversions": scores["inversions"],
    }
    if out:
        append_csv(out, EVAL_FIELDS, [row])
    auc_text = "-" if scores["auc"] is None else f"{scores['auc']:.4f}"
    click.echo(
        f"zero_one={scores['zero_one']:.4f} auc={auc_text} "
        f"fp={scores['fp']} fn={scores['fn']} inversions={scores['inversions']}"
    )


@main.command(name="lp-check")
@click.option("--trials", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--n-max", type=int, default=20, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@_friendly
def lp_check(trials, seed, n_max, out):
    """Compare the margin LP against mapped hard-margin dual solutions."""
    rows = lemma_feasibility_trials(trials, seed, out=out, n_max=n_max)
    worst = max(r["feasibility_violation"] for r in rows)
    agree = sum(1 for r in rows if abs(r["lp_mu"] - r["mapped_mu"]) <= 1e-3)
    click.echo(
        f"{trials} trials: max feasibility violation {worst:.2e}, "
        f"margins agree within 1e-3 in {agree}/{trials}"
    )


@main.command(name="sushi-prepare")
@click.option("--dir", "directory", type=click.Path(file_okay=False), help="Dataset directory (default: $SUSHI3_DIR, then common locations).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@_friendly
def sushi_prepare(directory, seed, out):
    """Build labeled pairs from the sushi survey files."""
    if directory is None:
        directory = find_dataset()
        if directory is None:
            raise click.ClickException(
                "sushi dataset not found; pass --dir or set $SUSHI3_DIR"
            )
    tables = parse_sushi_tables(directory)
    pairs = build_pairs(tables, seed)
    write_pairs_csv(pairs, out)
    click.echo(
        f"wrote {pairs.n} pairs ({pairs.tie_fraction():.3f} ties) "
        f"from {tables.n_users} users to {out}"
    )


@main.command(name="exp-error-vs-n")
@click.option("--pattern", "patterns", multiple=True, type=click.Choice(sorted(RANK_PATTERNS)))
@click.option("--n-list", default=None, help="Comma separated training sizes.")
@click.option("--rho", type=float, default=None, help="Tie proportion.")
@click.option("--seeds", type=int, default=None, help="Number of repetitions.")
@click.option("--base-seed", type=int, default=None)
@click.option("--tol", type=float, default=None)
@click.option("--max-iter", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="JSON defaults for the options above.")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@_friendly
def exp_error_vs_n(patterns, n_list, rho, seeds, base_seed, tol, max_iter, config_path, out):
    """Run the error-versus-training-size study (appends to --out)."""
    cfg = _load_config(config_path)
    run_error_vs_n(
        patterns=list(patterns) or list(cfg.get("patterns", sorted(RANK_PATTERNS))),
        n_list=_int_list(_pick(cfg, "n_list", n_list, ",".join(map(str, DEFAULT_N_LIST)))),
        rho=float(_pick(cfg, "rho", rho, 0.5)),
        seeds=int(_pick(cfg, "seeds", seeds, 4)),
        out=out,
        base_seed=int(_pick(cfg, "base_seed", base_seed, 0)),
        tol=float(_pick(cfg, "tol", tol, 1e-3)),
        max_iter=int(_pick(cfg, "max_iter", max_iter, 200_000)),
        **_grids(cfg),
    )
    click.echo(f"results appended to {out}")


@main.command(name="exp-auc-vs-rho")
@click.option("--pattern", "patterns", multiple=True, type=click.Choice(sorted(RANK_PATTERNS)))
@click.option("--rho-list", default=None, help="Comma separated tie proportions.")
@click.option("--n", type=int, default=None, help="Training size.")
@click.option("--seeds", type=int, default=None)
@click.option("--base-seed", type=int, default=None)
@click.option("--tol", type=float, default=None)
@click.option("--max-iter", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="JSON defaults for the options above.")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@_friendly
def exp_auc_vs_rho(patterns, rho_list, n, seeds, base_seed, tol, max_iter, config_path, out):
    """Run the AUC-versus-tie-proportion study (appends to --out)."""
    cfg = _load_config(config_path)
    run_auc_vs_rho(
        patterns=list(patterns) or list(cfg.get("patterns", sorted(RANK_PATTERNS))),
        rho_list=_float_list(
            _pick(cfg, "rho_list", rho_list, ",".join(map(str, DEFAULT_RHO_LIST)))
        ),
        n=int(_pick(cfg, "n", n, 400)),
        seeds=int(_pick(cfg, "seeds", seeds, 4)),
        out=out,
        base_seed=int(_pick(cfg, "base_seed", base_seed, 0)),
        tol=float(_pick(cfg, "tol", tol, 1e-3)),
        max_iter=int(_pick(cfg, "max_iter", max_iter, 200_000)),
        **_grids(cfg),
    )
    click.echo(f"results appended to {out}")


@main.command(name="export-levels")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--resolution", type=int, default=101, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@_friendly
def export_levels(model_path, resolution, out):
    """Export the fitted ranking function on a 2-d lattice."""
    model = load_model(model_path)
    table = export_level_curves(model, resolution, out)
    click.echo(f"wrote {table.shape[0]} lattice points to {out}")


if __name__ == "__main__":
    main()
