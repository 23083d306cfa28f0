"""Max-margin learning to compare with ties.

Comparison pairs (x, x', y) with y in {-1, 0, 1} train a latent ranking
function whose thresholded differences predict new comparisons.  The
package provides the comparison machine, ranking baselines, the margin
LP cross-check, tie-aware metrics, simulation and survey-data tooling.
"""

from .estimators import SVMCompare, SVMRank, SVMRank2, fit_threshold
from .kernels import GramPair, KernelSpec, gram, kernel_matrix, kernel_vector, pair_gram
from .lp import (
    LpSolution,
    check_lp_feasible,
    hard_margin_direction,
    lemma1_map,
    linear_direction,
    solve_lp,
    solve_max_margin_lp,
)
from .metrics import (
    ConfusionCounts,
    RocCurve,
    auc,
    confusion,
    midpoint_taus,
    roc_curve,
    threshold_label,
    zero_one_loss,
)
from .model_selection import GridSearchResult, grid_search
from .pairs import (
    FlippedDataset,
    LabeledPair,
    PairDataset,
    Scaler,
    apply_scaler,
    fit_scaler,
    flip,
    rank2_transform,
    read_pairs_csv,
    sample_disjoint,
    sample_with_proportion,
    write_pairs_csv,
)
from .persist import load_model, save_model
from .qp import (
    DualProblem,
    DualSolution,
    kkt_violation,
    oracle_solve,
    solve_dual_biased,
    solve_dual_unbiased,
)
from .simulate import RANK_PATTERNS, SimSpec, pattern_rank, simulate_dataset

__version__ = "0.1.0"

__all__ = [
    "ConfusionCounts",
    "DualProblem",
    "DualSolution",
    "FlippedDataset",
    "GramPair",
    "GridSearchResult",
    "KernelSpec",
    "LabeledPair",
    "LpSolution",
    "PairDataset",
    "RANK_PATTERNS",
    "RocCurve",
    "SVMCompare",
    "SVMRank",
    "SVMRank2",
    "Scaler",
    "SimSpec",
    "apply_scaler",
    "auc",
    "check_lp_feasible",
    "confusion",
    "fit_scaler",
    "fit_threshold",
    "flip",
    "gram",
    "grid_search",
    "hard_margin_direction",
    "kernel_matrix",
    "kernel_vector",
    "kkt_violation",
    "lemma1_map",
    "linear_direction",
    "load_model",
    "midpoint_taus",
    "oracle_solve",
    "pair_gram",
    "pattern_rank",
    "rank2_transform",
    "read_pairs_csv",
    "roc_curve",
    "sample_disjoint",
    "sample_with_proportion",
    "save_model",
    "simulate_dataset",
    "solve_dual_biased",
    "solve_dual_unbiased",
    "solve_lp",
    "solve_max_margin_lp",
    "threshold_label",
    "write_pairs_csv",
    "zero_one_loss",
]
