"""Max-margin linear program for separable comparison data.

On linearly separable pairs the largest margin mu such that ties score
within [-(1 - mu), 1 - mu] and inequality pairs score beyond +-(1 + mu)
is a linear program.  This module solves it with a dense two-phase
tableau simplex and provides the map from a hard-margin kernelized dual
solution onto the same (w, mu) space, so the two routes can be checked
against each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pairs import FlippedDataset, PairDataset, flip
from .kernels import KernelSpec, gram
from .qp import DualProblem, solve_dual_biased

_PIVOT_TOL = 1e-9
_FEAS_TOL = 1e-8


class SimplexError(RuntimeError):
    pass


def _pivot(tab: np.ndarray, basis: list[int], row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    factor = tab[:, col].copy()
    factor[row] = 0.0
    tab -= np.outer(factor, tab[row])
    basis[row] = col


def _iterate(tab: np.ndarray, basis: list[int], max_iter: int) -> str:
    """Run simplex steps on a tableau whose bottom row is z - c (maximize)."""
    n_rows = tab.shape[0] - 1
    bland = False
    degenerate_run = 0
    for _ in range(max_iter):
        reduced = tab[-1, :-1]
        neg = np.flatnonzero(reduced < -_PIVOT_TOL)
        if neg.size == 0:
            return "optimal"
        col = int(neg[0]) if bland else int(neg[np.argmin(reduced[neg])])
        column = tab[:n_rows, col]
        pos = np.flatnonzero(column > _PIVOT_TOL)
        if pos.size == 0:
            return "unbounded"
        ratios = tab[pos, -1] / column[pos]
        best = ratios.min()
        # smallest basis index among ratio ties, for anti-cycling
        tied = pos[np.flatnonzero(ratios <= best + _PIVOT_TOL)]
        row = int(min(tied, key=lambda r: basis[r]))
        if best <= _PIVOT_TOL:
            degenerate_run += 1
            if degenerate_run > 100:
                bland = True
        else:
            degenerate_run = 0
        _pivot(tab, basis, row, col)
    raise SimplexError("simplex iteration limit exceeded")


def solve_lp(c, a_ub, b_ub):
    """Maximize c @ x subject to a_ub @ x <= b_ub and x >= 0.

    Returns (status, x, objective) with status in
    {"optimal", "infeasible", "unbounded"}; x is None unless optimal.
    """
    c = np.asarray(c, dtype=np.float64)
    a = np.atleast_2d(np.asarray(a_ub, dtype=np.float64)).copy()
    b = np.asarray(b_ub, dtype=np.float64).copy()
    m, n = a.shape
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError("inconsistent LP dimensions")
    slack_sign = np.ones(m)
    flipped = b < 0
    a[flipped] *= -1.0
    b[flipped] *= -1.0
    slack_sign[flipped] = -1.0
    art_rows = np.flatnonzero(flipped)
    n_art = art_rows.size
    max_iter = 10_000 + 200 * (m + n)

    ncols = n + m + n_art
    tab = np.zeros((m + 1, ncols + 1))
    tab[:m, :n] = a
    tab[np.arange(m), n + np.arange(m)] = slack_sign
    tab[art_rows, n + m + np.arange(n_art)] = 1.0
    tab[:m, -1] = b
    basis = [0] * m
    art_pos = {int(r): k for k, r in enumerate(art_rows)}
    for i in range(m):
        basis[i] = n + m + art_pos[i] if i in art_pos else n + i

    if n_art:
        # phase 1: maximize -(sum of artificials)
        tab[-1, n + m : n + m + n_art] = 1.0
        for r in art_rows:
            tab[-1] -= tab[r]
        if _iterate(tab, basis, max_iter) != "optimal":
            raise SimplexError("phase 1 did not terminate at an optimum")
        if tab[-1, -1] < -_FEAS_TOL:
            return "infeasible", None, None
        # drive artificials out of the basis or drop redundant rows
        drop = []
        for r in range(m):
            if basis[r] >= n + m:
                cols = np.flatnonzero(np.abs(tab[r, : n + m]) > _PIVOT_TOL)
                if cols.size:
                    _pivot(tab, basis, r, int(cols[0]))
                else:
                    drop.append(r)
        if drop:
            keep = [r for r in range(m) if r not in drop]
            tab = tab[keep + [m]]
            basis = [basis[r] for r in keep]
        tab = np.delete(tab, np.s_[n + m : n + m + n_art], axis=1)

    c_ext = np.concatenate([c, np.zeros(tab.shape[1] - 1 - n)])
    tab[-1] = 0.0
    tab[-1, :-1] = -c_ext
    for r, col in enumerate(basis):
        if c_ext[col] != 0.0:
            tab[-1] += c_ext[col] * tab[r]
    status = _iterate(tab, basis, max_iter)
    if status == "unbounded":
        return "unbounded", None, None
    x = np.zeros(n)
    for r, col in enumerate(basis):
        if col < n:
            x[col] = tab[r, -1]
    return "optimal", x, float(tab[-1, -1])


@dataclass(frozen=True)
class LpSolution:
    """Margin LP outcome; w and mu are meaningful only when optimal."""

    w: np.ndarray | None
    mu: float
    status: str


def _diff_matrix(d: PairDataset) -> np.ndarray:
    return d.x_prime - d.x


def solve_max_margin_lp(d: PairDataset) -> LpSolution:
    """Largest margin mu over w for the comparison constraints of d.

    Ties demand |w . (x' - x)| <= 1 - mu, inequality pairs demand
    y w . (x' - x) >= 1 + mu, and mu >= 0.  Without any tie the margin
    is unbounded on separable data.
    """
    if len(d) == 0:
        raise ValueError("cannot solve the margin LP on an empty dataset")
    p = d.p
    diffs = _diff_matrix(d)
    rows = []
    rhs = []
    for i in range(d.n):
        di = diffs[i]
        if d.y[i] == 0:
            rows.append(np.concatenate([[1.0], di, -di]))
            rhs.append(1.0)
            rows.append(np.concatenate([[1.0], -di, di]))
            rhs.append(1.0)
        else:
            ydi = d.y[i] * di
            rows.append(np.concatenate([[1.0], -ydi, ydi]))
            rhs.append(-1.0)
    c = np.zeros(1 + 2 * p)
    c[0] = 1.0
    status, x, _ = solve_lp(c, np.vstack(rows), np.asarray(rhs))
    if status == "optimal":
        w = x[1 : 1 + p] - x[1 + p :]
        return LpSolution(w=w, mu=float(x[0]), status=status)
    mu = np.inf if status == "unbounded" else np.nan
    return LpSolution(w=None, mu=mu, status=status)


def check_lp_feasible(w: np.ndarray, mu: float, d: PairDataset) -> float:
    """Maximum violation of the margin constraints at (w, mu); <= 0 is feasible."""
    w = np.asarray(w, dtype=np.float64)
    scores = _diff_matrix(d) @ w
    worst = -float(mu)
    for i in range(d.n):
        if d.y[i] == 0:
            viol = mu - 1.0 + abs(scores[i])
        else:
            viol = mu + 1.0 - d.y[i] * scores[i]
        worst = max(worst, float(viol))
    return worst


def linear_direction(f: FlippedDataset, v: np.ndarray) -> np.ndarray:
    """Primal direction recovered from a linear-kernel dual solution."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (f.m,):
        raise ValueError("v must align with the flipped rows")
    weights = f.y_tilde * v
    return ((f.x_tilde_prime - f.x_tilde) * weights[:, None]).sum(axis=0)


def lemma1_map(u: np.ndarray, beta: float) -> tuple[np.ndarray, float]:
    """Map a hard-margin dual solution (direction u, bias beta) to (w, mu).

    Valid only when beta < 0, which holds whenever at least one tie is
    present in the hard-margin problem.
    """
    if not beta < 0:
        raise ValueError("QP solution not in Lemma 1 regime")
    u = np.asarray(u, dtype=np.float64)
    return -u / beta, -1.0 / beta


def hard_margin_direction(
    d: PairDataset,
    c: float = 1e6,
    tol: float = 1e-8,
    max_iter: int = 5_000_000,
):
    """Linear-kernel hard-margin dual solve; returns (u, beta, solution)."""
    f = flip(d)
    spec = KernelSpec("linear")
    kernels = gram(spec, f)
    q = kernels.diff * np.outer(f.y_tilde, f.y_tilde)
    q = 0.5 * (q + q.T)
    sol = solve_dual_biased(
        DualProblem(q, f.y_tilde, c), tol=tol, max_iter=max_iter, check_psd=False
    )
    return linear_direction(f, sol.v), sol.beta, sol
