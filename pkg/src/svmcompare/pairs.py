"""Labeled comparison pairs and the dataset transforms used before training.

A comparison pair (x, x', y) records that x' is better (y = 1), worse
(y = -1), or about the same (y = 0) relative to x.  Training algorithms
consume reoriented or duplicated views of a :class:`PairDataset`; the
helpers here produce those views deterministically.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .validation import check_labels, check_pair_arrays

SCALE_FLOOR = 1e-12


@dataclass(frozen=True)
class LabeledPair:
    """One comparison: feature vectors x, x_prime and a label in {-1, 0, 1}."""

    x: np.ndarray
    x_prime: np.ndarray
    y: int

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        x_prime = np.asarray(self.x_prime, dtype=np.float64)
        if x.ndim != 1 or x_prime.ndim != 1 or x.shape != x_prime.shape:
            raise ValueError("pair features must be 1-d vectors of equal length")
        if not (np.isfinite(x).all() and np.isfinite(x_prime).all()):
            raise ValueError("pair features must be finite")
        if self.y not in (-1, 0, 1):
            raise ValueError(f"pair label must be in {{-1, 0, 1}}, got {self.y!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "x_prime", x_prime)
        object.__setattr__(self, "y", int(self.y))


@dataclass(frozen=True)
class PairDataset:
    """Immutable batch of comparison pairs with aligned rows."""

    x: np.ndarray
    x_prime: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x, x_prime, y = check_pair_arrays(self.x, self.x_prime, self.y, allow_empty=True)
        for name, arr in (("x", x), ("x_prime", x_prime), ("y", y)):
            arr = np.ascontiguousarray(arr)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_pairs(cls, pairs) -> "PairDataset":
        pairs = [p if isinstance(p, LabeledPair) else LabeledPair(*p) for p in pairs]
        if not pairs:
            raise ValueError("from_pairs requires at least one pair")
        return cls(
            np.vstack([p.x for p in pairs]),
            np.vstack([p.x_prime for p in pairs]),
            np.array([p.y for p in pairs], dtype=np.int64),
        )

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def indices(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.y == label)

    def count(self, label: int) -> int:
        return int(np.count_nonzero(self.y == label))

    def tie_fraction(self) -> float:
        return self.count(0) / self.n

    def subset(self, idx) -> "PairDataset":
        idx = np.asarray(idx, dtype=np.int64)
        return PairDataset(self.x[idx], self.x_prime[idx], self.y[idx])

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> LabeledPair:
        return LabeledPair(self.x[i], self.x_prime[i], int(self.y[i]))

    def __iter__(self):
        return (self[i] for i in range(self.n))


@dataclass(frozen=True)
class FlippedDataset:
    """Pairs reoriented so every label is +1 (worse, better) or -1 (tie)."""

    x_tilde: np.ndarray
    x_tilde_prime: np.ndarray
    y_tilde: np.ndarray

    def __post_init__(self):
        x, xp = check_pair_arrays(self.x_tilde, self.x_tilde_prime)
        y = np.asarray(self.y_tilde)
        if y.ndim != 1 or y.shape[0] != x.shape[0]:
            raise ValueError("y_tilde must be 1-d and aligned with the rows")
        if y.size and not np.all(np.isin(y, (-1, 1))):
            raise ValueError("y_tilde values must be in {-1, 1}")
        for name, arr in (
            ("x_tilde", x),
            ("x_tilde_prime", xp),
            ("y_tilde", y.astype(np.int64)),
        ):
            arr = np.ascontiguousarray(arr)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def m(self) -> int:
        return self.x_tilde.shape[0]

    @property
    def p(self) -> int:
        return self.x_tilde.shape[1]


def flip(d: PairDataset) -> FlippedDataset:
    """Reorient pairs for the comparison QP.

    Inequality pairs all point the same way afterwards (label +1, with
    y = -1 pairs swapped); each tie contributes both orientations with
    label -1.  Row count is n_pos + n_neg + 2 * n_tie.
    """
    if len(d) == 0:
        raise ValueError("cannot flip an empty dataset")
    pos, neg, tie = d.indices(1), d.indices(-1), d.indices(0)
    x_tilde = np.vstack([d.x[pos], d.x_prime[neg], d.x[tie], d.x_prime[tie]])
    x_tilde_prime = np.vstack([d.x_prime[pos], d.x[neg], d.x_prime[tie], d.x[tie]])
    y_tilde = np.concatenate(
        [
            np.ones(len(pos) + len(neg), dtype=np.int64),
            -np.ones(2 * len(tie), dtype=np.int64),
        ]
    )
    return FlippedDataset(x_tilde, x_tilde_prime, y_tilde)


def rank2_transform(d: PairDataset) -> PairDataset:
    """Rewrite ties as two opposed inequality pairs; duplicate the rest.

    Each tie (x, x', 0) becomes (x', x, 1) and (x, x', 1); every
    inequality pair is emitted twice unchanged.  Output has 2n pairs and
    no ties, so a ranking trainer can consume it directly.
    """
    if len(d) == 0:
        raise ValueError("cannot transform an empty dataset")
    xs, xps, ys = [], [], []
    for i in range(d.n):
        if d.y[i] == 0:
            xs.append(d.x_prime[i])
            xps.append(d.x[i])
            ys.append(1)
            xs.append(d.x[i])
            xps.append(d.x_prime[i])
            ys.append(1)
        else:
            for _ in range(2):
                xs.append(d.x[i])
                xps.append(d.x_prime[i])
                ys.append(int(d.y[i]))
    return PairDataset(np.vstack(xs), np.vstack(xps), np.array(ys, dtype=np.int64))


@dataclass(frozen=True)
class Scaler:
    """Per-feature standardization fitted on the pooled x and x' rows."""

    mean: np.ndarray
    scale: np.ndarray
    constant_mask: np.ndarray

    def __post_init__(self):
        for name in ("mean", "scale", "constant_mask"):
            arr = np.ascontiguousarray(np.asarray(getattr(self, name)))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def p(self) -> int:
        return self.mean.shape[0]

    def transform(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.float64)
        if a.shape[-1] != self.p:
            raise ValueError(f"scaler fitted for {self.p} features, got {a.shape[-1]}")
        return (a - self.mean) / self.scale

    def inverse_transform(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.float64)
        if a.shape[-1] != self.p:
            raise ValueError(f"scaler fitted for {self.p} features, got {a.shape[-1]}")
        return a * self.scale + self.mean


def fit_scaler(d: PairDataset) -> Scaler:
    """Mean / population-sd statistics over all 2n feature rows of d."""
    if len(d) == 0:
        raise ValueError("cannot fit a scaler on an empty dataset")
    pooled = np.vstack([d.x, d.x_prime])
    mean = pooled.mean(axis=0)
    sd = pooled.std(axis=0)
    constant = sd <= SCALE_FLOOR
    if constant.any():
        warnings.warn(
            f"{int(constant.sum())} constant feature(s); their scale is left at 1",
            RuntimeWarning,
            stacklevel=2,
        )
    return Scaler(mean, np.where(constant, 1.0, sd), constant)


def apply_scaler(scaler: Scaler, d: PairDataset) -> PairDataset:
    return PairDataset(scaler.transform(d.x), scaler.transform(d.x_prime), d.y)


def round_half_away(value: float) -> int:
    """Round a nonnegative count, halves away from zero (2.5 -> 3)."""
    if value < 0:
        raise ValueError("expected a nonnegative value")
    return int(np.floor(value + 0.5))


def _proportion_counts(n: int, rho: float) -> tuple[int, int]:
    if n < 1:
        raise ValueError("sample size must be at least 1")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"tie proportion must be in [0, 1], got {rho}")
    n_tie = round_half_away(rho * n)
    return n_tie, n - n_tie


def sample_with_proportion(source: PairDataset, n: int, rho: float, seed) -> PairDataset:
    """Sample n pairs without replacement at an exact tie proportion.

    The tie count is round(rho * n) with halves away from zero; the rest
    are inequality pairs drawn uniformly regardless of direction.
    """
    n_tie, n_ineq = _proportion_counts(n, rho)
    rng = np.random.default_rng(seed)
    tie_idx = source.indices(0)
    ineq_idx = np.flatnonzero(source.y != 0)
    if len(tie_idx) < n_tie:
        raise ValueError(f"insufficient equality pairs: need {n_tie}, have {len(tie_idx)}")
    if len(ineq_idx) < n_ineq:
        raise ValueError(
            f"insufficient inequality pairs: need {n_ineq}, have {len(ineq_idx)}"
        )
    idx = np.concatenate(
        [
            rng.choice(tie_idx, n_tie, replace=False),
            rng.choice(ineq_idx, n_ineq, replace=False),
        ]
    )
    rng.shuffle(idx)
    return source.subset(idx)


def sample_disjoint(
    source: PairDataset, n: int, rho: float, seed, parts: int = 3
) -> tuple[PairDataset, ...]:
    """Draw several disjoint samples, each of size n at tie proportion rho."""
    n_tie, n_ineq = _proportion_counts(n, rho)
    rng = np.random.default_rng(seed)
    tie_idx = source.indices(0)
    ineq_idx = np.flatnonzero(source.y != 0)
    if len(tie_idx) < parts * n_tie:
        raise ValueError(
            f"insufficient equality pairs: need {parts * n_tie}, have {len(tie_idx)}"
        )
    if len(ineq_idx) < parts * n_ineq:
        raise ValueError(
            f"insufficient inequality pairs: need {parts * n_ineq}, have {len(ineq_idx)}"
        )
    tie_pick = rng.choice(tie_idx, parts * n_tie, replace=False)
    ineq_pick = rng.choice(ineq_idx, parts * n_ineq, replace=False)
    out = []
    for k in range(parts):
        idx = np.concatenate(
            [
                tie_pick[k * n_tie : (k + 1) * n_tie],
                ineq_pick[k * n_ineq : (k + 1) * n_ineq],
            ]
        )
        rng.shuffle(idx)
        out.append(source.subset(idx))
    return tuple(out)


def _csv_header(p: int) -> list[str]:
    return [f"x{i}" for i in range(1, p + 1)] + [f"xp{i}" for i in range(1, p + 1)] + ["y"]


def write_pairs_csv(d: PairDataset, path) -> None:
    """Write pairs as CSV with header x1..xp,xp1..xpp,y (round-trip exact)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_csv_header(d.p))
        for i in range(d.n):
            row = [repr(float(v)) for v in d.x[i]]
            row += [repr(float(v)) for v in d.x_prime[i]]
            row.append(str(int(d.y[i])))
            writer.writerow(row)


def read_pairs_csv(path) -> PairDataset:
    """Read a pairs CSV; malformed rows raise with their line number."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        ncol = len(header)
        if ncol < 3 or ncol % 2 == 0:
            raise ValueError(f"{path}: line 1: expected 2p+1 columns, got {ncol}")
        p = (ncol - 1) // 2
        if header != _csv_header(p):
            raise ValueError(
                f"{path}: line 1: expected header {','.join(_csv_header(p))}"
            )
        xs, xps, ys = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != ncol:
                raise ValueError(
                    f"{path}: line {lineno}: expected {ncol} fields, got {len(row)}"
                )
            try:
                vals = [float(v) for v in row[: 2 * p]]
                label = int(row[2 * p])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: unparseable value") from None
            if label not in (-1, 0, 1):
                raise ValueError(
                    f"{path}: line {lineno}: label must be in {{-1, 0, 1}}, got {label}"
                )
            xs.append(vals[:p])
            xps.append(vals[p:])
            ys.append(label)
    x = np.asarray(xs, dtype=np.float64).reshape(len(xs), p)
    x_prime = np.asarray(xps, dtype=np.float64).reshape(len(xps), p)
    return PairDataset(x, x_prime, np.asarray(ys, dtype=np.int64))
