"""Dual solvers for the box-constrained comparison and ranking QPs.

Both problems minimize 0.5 v'Qv - sum(v) over 0 <= v <= C.  The biased
variant adds the equality constraint sum(y_i v_i) = 0 and is solved by
sequential minimal optimization on the most violating pair; the
unbiased variant has no equality constraint and uses greedy coordinate
descent.  A brute-force oracle over active-set assignments covers small
instances for verification.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numba
import numpy as np

ORACLE_MAX = 8
PSD_TOL = 1e-8
_CURV_FLOOR = 1e-12


@dataclass(frozen=True)
class DualProblem:
    """Quadratic dual with box [0, C]; y is None for the unbiased form."""

    Q: np.ndarray
    y: np.ndarray | None
    C: float

    def __post_init__(self):
        q = np.ascontiguousarray(np.asarray(self.Q, dtype=np.float64))
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError(f"Q must be square, got shape {q.shape}")
        if not np.isfinite(q).all():
            raise ValueError("Q must be finite")
        if q.size and np.abs(q - q.T).max() > 1e-10:
            raise ValueError("Q must be symmetric within 1e-10")
        q.setflags(write=False)
        object.__setattr__(self, "Q", q)
        if self.y is not None:
            y = np.asarray(self.y)
            if y.shape != (q.shape[0],):
                raise ValueError("y must align with Q")
            if y.size and not np.all(np.isin(y, (-1, 1))):
                raise ValueError("y values must be in {-1, 1}")
            y = np.ascontiguousarray(y.astype(np.int64))
            y.setflags(write=False)
            object.__setattr__(self, "y", y)
        if not self.C > 0:
            raise ValueError(f"C must be positive, got {self.C}")
        object.__setattr__(self, "C", float(self.C))

    @property
    def m(self) -> int:
        return self.Q.shape[0]


@dataclass(frozen=True)
class DualSolution:
    """Solver output; beta is the recovered bias (None when unbiased)."""

    v: np.ndarray
    beta: float | None
    objective: float
    kkt_violation: float
    iterations: int
    converged: bool

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.v, dtype=np.float64))
        v.setflags(write=False)
        object.__setattr__(self, "v", v)


@numba.njit(cache=True)
def _smo_biased(q, y, c, tol, max_iter):
    m = q.shape[0]
    v = np.zeros(m)
    g = -np.ones(m)
    it = 0
    while it < max_iter:
        i_up = -1
        i_lo = -1
        crit_up = -np.inf
        crit_lo = np.inf
        for t in range(m):
            crit = -y[t] * g[t]
            if (y[t] > 0.0 and v[t] < c) or (y[t] < 0.0 and v[t] > 0.0):
                if crit > crit_up:
                    crit_up = crit
                    i_up = t
            if (y[t] < 0.0 and v[t] < c) or (y[t] > 0.0 and v[t] > 0.0):
                if crit < crit_lo:
                    crit_lo = crit
                    i_lo = t
        if i_up < 0 or i_lo < 0 or crit_up - crit_lo <= tol:
            break
        i = i_up
        j = i_lo
        s = y[i] * y[j]
        curv = q[i, i] + q[j, j] - 2.0 * s * q[i, j]
        if curv < _CURV_FLOOR:
            curv = _CURV_FLOOR
        step = -(g[i] - s * g[j]) / curv
        # feasible step range along (dv_i, dv_j) = (1, -s)
        lo = -v[i]
        lo_from_j = False
        cand = v[j] - c if s > 0.0 else -v[j]
        if cand > lo:
            lo = cand
            lo_from_j = True
        hi = c - v[i]
        hi_from_j = False
        cand = v[j] if s > 0.0 else c - v[j]
        if cand < hi:
            hi = cand
            hi_from_j = True
        if step <= lo:
            step = lo
            if lo_from_j:
                v[j] = c if s > 0.0 else 0.0
                v[i] = v[i] + step
            else:
                v[i] = 0.0
                v[j] = v[j] - s * step
        elif step >= hi:
            step = hi
            if hi_from_j:
                v[j] = 0.0 if s > 0.0 else c
                v[i] = v[i] + step
            else:
                v[i] = c
                v[j] = v[j] - s * step
        else:
            v[i] = v[i] + step
            v[j] = v[j] - s * step
        if v[i] < 0.0:
            v[i] = 0.0
        elif v[i] > c:
            v[i] = c
        if v[j] < 0.0:
            v[j] = 0.0
        elif v[j] > c:
            v[j] = c
        for t in range(m):
            g[t] += step * (q[i, t] - s * q[j, t])
        it += 1
    return v, it


@numba.njit(cache=True)
def _coord_unbiased(q, c, tol, max_iter):
    m = q.shape[0]
    v = np.zeros(m)
    g = -np.ones(m)
    it = 0
    while it < max_iter:
        best = -1
        viol = tol
        for t in range(m):
            if v[t] <= 0.0:
                w = -g[t]
            elif v[t] >= c:
                w = g[t]
            else:
                w = g[t] if g[t] > 0.0 else -g[t]
            if w > viol:
                viol = w
                best = t
        if best < 0:
            break
        i = best
        qii = q[i, i]
        if qii < _CURV_FLOOR:
            target = c if g[i] < 0.0 else 0.0
        else:
            target = v[i] - g[i] / qii
            if target < 0.0:
                target = 0.0
            elif target > c:
                target = c
        step = target - v[i]
        v[i] = target
        for t in range(m):
            g[t] += step * q[i, t]
        it += 1
    return v, it


def _biased_gap(v, g, y, c) -> float:
    crit = -y * g
    up = ((y > 0) & (v < c)) | ((y < 0) & (v > 0))
    lo = ((y < 0) & (v < c)) | ((y > 0) & (v > 0))
    if not up.any() or not lo.any():
        return 0.0
    return max(0.0, float(crit[up].max() - crit[lo].min()))


def _unbiased_violation(v, g, c) -> float:
    at_lo = v <= 0.0
    at_hi = v >= c
    viol = np.where(at_lo, -g, np.where(at_hi, g, np.abs(g)))
    return max(0.0, float(viol.max()))


def _bias_from_gradient(v, g, y, c) -> float:
    crit = -y * g
    free = (v > 0.0) & (v < c)
    if free.any():
        return float(crit[free].mean())
    lower = ((v <= 0.0) & (y > 0)) | ((v >= c) & (y < 0))
    upper = ((v <= 0.0) & (y < 0)) | ((v >= c) & (y > 0))
    lo = float(crit[lower].max()) if lower.any() else -np.inf
    hi = float(crit[upper].min()) if upper.any() else np.inf
    if np.isinf(lo) and np.isinf(hi):
        return 0.0
    if np.isinf(lo):
        return hi
    if np.isinf(hi):
        return lo
    return (lo + hi) / 2.0


def _objective(q, v) -> float:
    return float(0.5 * v @ (q @ v) - v.sum())


def _check_psd(q) -> None:
    if q.size == 0:
        return
    eigs = np.linalg.eigvalsh(q)
    scale = max(1.0, float(np.abs(eigs).max()))
    if float(eigs.min()) < -PSD_TOL * scale:
        raise ValueError("Q is not positive semidefinite within tolerance")


def solve_dual_biased(
    problem: DualProblem,
    tol: float = 1e-3,
    max_iter: int = 10_000_000,
    *,
    check_psd: bool = True,
) -> DualSolution:
    """Solve the equality-constrained dual by most-violating-pair SMO.

    Starts from v = 0 (always feasible), snaps bound-hitting updates to
    exact 0 / C, and stops when the maximal KKT pair gap drops to tol.
    Hitting max_iter returns a non-converged solution, not an error.
    """
    if problem.y is None:
        raise ValueError("biased solver requires labels on the problem")
    if check_psd:
        _check_psd(problem.Q)
    y = problem.y.astype(np.float64)
    v, it = _smo_biased(problem.Q, y, problem.C, float(tol), int(max_iter))
    g = problem.Q @ v - 1.0
    gap = _biased_gap(v, g, y, problem.C)
    return DualSolution(
        v=v,
        beta=_bias_from_gradient(v, g, y, problem.C),
        objective=_objective(problem.Q, v),
        kkt_violation=gap,
        iterations=int(it),
        converged=gap <= tol,
    )


def solve_dual_unbiased(
    q: np.ndarray,
    c: float,
    tol: float = 1e-3,
    max_iter: int = 10_000_000,
    *,
    check_psd: bool = True,
) -> DualSolution:
    """Solve the box-only dual by greedy most-violating coordinate descent."""
    problem = DualProblem(q, None, c)
    if check_psd:
        _check_psd(problem.Q)
    v, it = _coord_unbiased(problem.Q, problem.C, float(tol), int(max_iter))
    g = problem.Q @ v - 1.0
    viol = _unbiased_violation(v, g, problem.C)
    return DualSolution(
        v=v,
        beta=None,
        objective=_objective(problem.Q, v),
        kkt_violation=viol,
        iterations=int(it),
        converged=viol <= tol,
    )


def kkt_violation(problem: DualProblem, v: np.ndarray) -> float:
    """Recompute the optimality violation of v for the given problem (0 at optimum)."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (problem.m,):
        raise ValueError("v must align with Q")
    g = problem.Q @ v - 1.0
    if problem.y is None:
        return _unbiased_violation(v, g, problem.C)
    return _biased_gap(v, g, problem.y.astype(np.float64), problem.C)


def _solve_consistent(a, b):
    sol = np.linalg.lstsq(a, b, rcond=None)[0]
    if not np.isfinite(sol).all():
        return sol, False
    resid = float(np.abs(a @ sol - b).max()) if b.size else 0.0
    return sol, resid <= 1e-7 * max(1.0, float(np.abs(b).max()))


def oracle_solve(problem: DualProblem) -> DualSolution:
    """Exhaustive reference solver for tiny duals.

    Enumerates every {lower, upper, free} assignment of the m variables,
    solves the restricted stationarity system, keeps the feasible
    candidate with the smallest objective.  Assumes the restricted
    systems are nonsingular (generic PSD input); refuses m > 8.
    """
    if problem.m > ORACLE_MAX:
        raise ValueError(f"oracle limited to m <= {ORACLE_MAX}")
    _check_psd(problem.Q)
    q, c = problem.Q, problem.C
    m = problem.m
    biased = problem.y is not None
    y = problem.y.astype(np.float64) if biased else None
    best_v = None
    best_obj = np.inf
    tried = 0
    for assign in itertools.product((0, 1, 2), repeat=m):
        tried += 1
        code = np.array(assign)
        free = np.flatnonzero(code == 2)
        upper = np.flatnonzero(code == 1)
        v = np.zeros(m)
        v[upper] = c
        if free.size:
            qfu_sum = q[np.ix_(free, upper)] @ np.full(upper.size, c)
            if biased:
                k = free.size
                a = np.zeros((k + 1, k + 1))
                a[:k, :k] = q[np.ix_(free, free)]
                a[:k, k] = y[free]
                a[k, :k] = y[free]
                rhs = np.concatenate([1.0 - qfu_sum, [-c * y[upper].sum()]])
                sol, ok = _solve_consistent(a, rhs)
                vf = sol[:k]
            else:
                sol, ok = _solve_consistent(q[np.ix_(free, free)], 1.0 - qfu_sum)
                vf = sol
            if not ok or (vf < -1e-9 * max(1.0, c)).any() or (
                vf > c * (1.0 + 1e-9) + 1e-9
            ).any():
                continue
            v[free] = np.clip(vf, 0.0, c)
        elif biased and abs(c * y[upper].sum()) > 1e-9 * max(1.0, c):
            continue
        obj = _objective(q, v)
        if obj < best_obj:
            best_obj = obj
            best_v = v
    if best_v is None:
        raise RuntimeError("oracle found no feasible candidate")
    g = q @ best_v - 1.0
    if biased:
        beta = _bias_from_gradient(best_v, g, y, c)
        viol = _biased_gap(best_v, g, y, c)
    else:
        beta = None
        viol = _unbiased_violation(best_v, g, c)
    return DualSolution(
        v=best_v,
        beta=beta,
        objective=best_obj,
        kkt_violation=viol,
        iterations=tried,
        converged=True,
    )
