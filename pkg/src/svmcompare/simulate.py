"""Synthetic comparison pairs over the square [-3, 3]^2.

Feature vectors are drawn uniformly; the latent rank is a squared
vector norm chosen by pattern name; labels come from thresholding the
noisy rank difference at 1.  Rejection sampling enforces an exact tie
count of round(rho * n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import threshold_label
from .pairs import PairDataset, round_half_away

LOW, HIGH = -3.0, 3.0

RANK_PATTERNS = {
    "norm1": lambda x: np.abs(x).sum(axis=-1) ** 2,
    "norm2": lambda x: (x * x).sum(axis=-1),
    "norminf": lambda x: np.abs(x).max(axis=-1) ** 2,
}


def pattern_rank(pattern: str, x: np.ndarray) -> np.ndarray:
    """Latent rank values for a named pattern (squared 1-, 2- or max-norm)."""
    if pattern not in RANK_PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r}")
    return RANK_PATTERNS[pattern](np.asarray(x, dtype=np.float64))


@dataclass(frozen=True)
class SimSpec:
    """Simulation settings; sigma is the label-noise standard deviation."""

    pattern: str
    n: int
    rho: float
    sigma: float = 0.25
    seed: object = 0

    def __post_init__(self):
        if self.pattern not in RANK_PATTERNS:
            raise ValueError(f"unknown pattern {self.pattern!r}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must be in [0, 1], got {self.rho}")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


def simulate_dataset(spec: SimSpec) -> PairDataset:
    """Draw pairs until the exact tie / inequality quotas are both met."""
    rng = np.random.default_rng(spec.seed)
    need_tie = round_half_away(spec.rho * spec.n)
    need_ineq = spec.n - need_tie
    xs, xps, ys = [], [], []
    batch = max(256, 4 * spec.n)
    while need_tie > 0 or need_ineq > 0:
        x = rng.uniform(LOW, HIGH, size=(batch, 2))
        x_prime = rng.uniform(LOW, HIGH, size=(batch, 2))
        noise = rng.normal(0.0, spec.sigma, size=batch)
        diff = pattern_rank(spec.pattern, x_prime) - pattern_rank(spec.pattern, x) + noise
        labels = threshold_label(diff, 1.0)
        for k in range(batch):
            if labels[k] == 0:
                if need_tie == 0:
                    continue
                need_tie -= 1
            else:
                if need_ineq == 0:
                    continue
                need_ineq -= 1
            xs.append(x[k])
            xps.append(x_prime[k])
            ys.append(int(labels[k]))
            if need_tie == 0 and need_ineq == 0:
                break
    return PairDataset(np.vstack(xs), np.vstack(xps), np.array(ys, dtype=np.int64))
