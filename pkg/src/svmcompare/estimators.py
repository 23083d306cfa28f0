"""Support vector estimators over comparison pairs, scikit-learn style.

``SVMCompare`` trains on ties and directed pairs jointly through the
reorienting transform and a biased dual.  ``SVMRank`` is the ranking
baseline (directed pairs only, unbiased dual) with a tie threshold
fitted afterwards; ``SVMRank2`` feeds the tie-splitting transform to the
same baseline.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .kernels import KernelSpec, kernel_matrix, pair_gram, gram
from .metrics import midpoint_taus, threshold_label
from .pairs import PairDataset, apply_scaler, fit_scaler, flip, rank2_transform
from .qp import DualProblem, solve_dual_biased, solve_dual_unbiased
from .validation import check_feature_matrix, check_labels, check_pair_arrays


def fit_threshold(rank_diffs, labels) -> float:
    """Tie threshold minimizing zero-one loss of the induced labels.

    Candidates are 0, the midpoints between consecutive distinct
    |rank_diffs|, and a value beyond the largest magnitude; ties in loss
    go to the smallest candidate.
    """
    diffs = np.asarray(rank_diffs, dtype=np.float64)
    if diffs.ndim != 1 or diffs.size == 0:
        raise ValueError("rank_diffs must be a nonempty 1-d array")
    y = check_labels(labels, diffs.shape[0])
    cands = np.concatenate([[0.0], midpoint_taus(diffs), [np.abs(diffs).max() + 1.0]])
    best_tau = 0.0
    best_err = None
    for tau in cands:
        err = int(np.count_nonzero(threshold_label(diffs, float(tau)) != y))
        if best_err is None or err < best_err:
            best_tau, best_err = float(tau), err
    return best_tau


class _PairEstimator(BaseEstimator):
    """Shared plumbing: params, scaling, kernel access, rank evaluation."""

    def __init__(
        self,
        C: float = 1.0,
        kernel: str = "linear",
        gamma: float = 1.0,
        scale: bool = True,
        tol: float = 1e-3,
        max_iter: int = 10_000_000,
    ):
        self.C = C
        self.kernel = kernel
        self.gamma = gamma
        self.scale = scale
        self.tol = tol
        self.max_iter = max_iter

    def _kernel_spec(self) -> KernelSpec:
        gamma = self.gamma if self.kernel == "gaussian" else None
        return KernelSpec(self.kernel, gamma)

    def _prepare(self, X, X_prime, y) -> tuple[PairDataset, PairDataset]:
        x, x_prime, y = check_pair_arrays(X, X_prime, y)
        d = PairDataset(x, x_prime, y)
        self.scaler_ = fit_scaler(d) if self.scale else None
        ds = apply_scaler(self.scaler_, d) if self.scaler_ is not None else d
        return d, ds

    def _store_solution(self, qd: PairDataset | None, f, sol) -> None:
        self.objective_ = sol.objective
        self.kkt_violation_ = sol.kkt_violation
        self.iterations_ = sol.iterations
        self.converged_ = sol.converged
        sv = sol.v > 0.0
        self.sv_indices_ = np.flatnonzero(sv)
        if f is not None:
            self.m_ = f.m
            self.sv_x_ = f.x_tilde[sv]
            self.sv_x_prime_ = f.x_tilde_prime[sv]
            self.sv_y_ = f.y_tilde[sv]
        else:
            self.m_ = qd.n
            self.sv_x_ = qd.x[sv]
            self.sv_x_prime_ = qd.x_prime[sv]
            self.sv_y_ = qd.y[sv]
        self.sv_v_ = sol.v[sv]

    def _probe(self, X) -> np.ndarray:
        check_is_fitted(self, "sv_v_")
        x = check_feature_matrix(X)
        if x.shape[1] != self.p_:
            raise ValueError(f"expected {self.p_} features, got {x.shape[1]}")
        if self.scaler_ is not None:
            x = self.scaler_.transform(x)
        return x

    def rank_diffs(self, X, X_prime) -> np.ndarray:
        """Rank difference r(x') - r(x) per pair."""
        x, x_prime = check_pair_arrays(X, X_prime)
        return self.rank(x_prime) - self.rank(x)


class SVMCompare(_PairEstimator):
    """Comparison machine trained on ties and directed pairs together.

    After reorienting, directed pairs ask the latent rank difference to
    exceed 1 while ties ask it to stay below 1; the fitted ranking
    function is normalized by the recovered bias so the canonical
    decision threshold is tau = 1.
    """

    def fit(self, X, X_prime, y):
        d, ds = self._prepare(X, X_prime, y)
        if d.count(0) == 0:
            raise ValueError("training requires at least one equality pair")
        if d.count(0) == d.n:
            raise ValueError("training requires at least one inequality pair")
        f = flip(ds)
        yt = f.y_tilde.astype(np.float64)
        q = gram(self._kernel_spec(), f).diff * np.outer(yt, yt)
        q = 0.5 * (q + q.T)
        sol = solve_dual_biased(
            DualProblem(q, f.y_tilde, self.C),
            tol=self.tol,
            max_iter=self.max_iter,
            check_psd=False,
        )
        self.p_ = d.p
        self.n_features_in_ = d.p
        self._store_solution(None, f, sol)
        self.beta_ = float(sol.beta)
        return self

    def rank(self, X) -> np.ndarray:
        x = self._probe(X)
        if self.beta_ == 0.0:
            raise ValueError("bias is zero; ranking function undefined")
        if self.sv_v_.size == 0:
            return np.zeros(x.shape[0])
        spec = self._kernel_spec()
        k_plain = kernel_matrix(spec, x, self.sv_x_)
        k_other = kernel_matrix(spec, x, self.sv_x_prime_)
        weights = self.sv_y_ * self.sv_v_
        return (k_plain - k_other) @ weights / self.beta_

    def predict(self, X, X_prime, tau: float = 1.0) -> np.ndarray:
        return threshold_label(self.rank_diffs(X, X_prime), tau)


class SVMRank(_PairEstimator):
    """Ranking baseline: directed pairs only, tie threshold fitted after."""

    def _qp_dataset(self, ds: PairDataset) -> PairDataset:
        ineq = np.flatnonzero(ds.y != 0)
        if ineq.size == 0:
            raise ValueError("training requires at least one inequality pair")
        return ds.subset(ineq)

    def fit(self, X, X_prime, y):
        d, ds = self._prepare(X, X_prime, y)
        qd = self._qp_dataset(ds)
        yq = qd.y.astype(np.float64)
        q = pair_gram(self._kernel_spec(), qd.x, qd.x_prime).diff * np.outer(yq, yq)
        q = 0.5 * (q + q.T)
        sol = solve_dual_unbiased(
            q, self.C, tol=self.tol, max_iter=self.max_iter, check_psd=False
        )
        self.p_ = d.p
        self.n_features_in_ = d.p
        self._store_solution(qd, None, sol)
        # threshold fitted on every training pair, ties included
        diffs = self._rank_scaled(ds.x_prime) - self._rank_scaled(ds.x)
        self.tau_hat_ = fit_threshold(diffs, d.y)
        return self

    def _rank_scaled(self, rows: np.ndarray) -> np.ndarray:
        if self.sv_v_.size == 0:
            return np.zeros(rows.shape[0])
        spec = self._kernel_spec()
        k_better = kernel_matrix(spec, rows, self.sv_x_prime_)
        k_worse = kernel_matrix(spec, rows, self.sv_x_)
        return (k_better - k_worse) @ (self.sv_y_ * self.sv_v_)

    def rank(self, X) -> np.ndarray:
        return self._rank_scaled(self._probe(X))

    def predict(self, X, X_prime, tau: float | None = None) -> np.ndarray:
        if tau is None:
            check_is_fitted(self, "tau_hat_")
            tau = self.tau_hat_
        return threshold_label(self.rank_diffs(X, X_prime), tau)


class SVMRank2(SVMRank):
    """Ranking baseline fed the tie-splitting transform of the data.

    Every tie becomes two opposed directed pairs and every directed pair
    is duplicated, so the QP sees 2n pairs; the tie threshold is still
    fitted on the original pairs.
    """

    def _qp_dataset(self, ds: PairDataset) -> PairDataset:
        return rank2_transform(ds)
