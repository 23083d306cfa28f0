"""Kernels and the Gram matrices consumed by the dual solvers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pairs import FlippedDataset

KERNEL_FAMILIES = ("linear", "gaussian")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its width parameter (gamma, gaussian only)."""

    family: str
    gamma: float | None = None

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == "gaussian":
            if self.gamma is None or not self.gamma > 0:
                raise ValueError("gaussian kernel requires gamma > 0")
            object.__setattr__(self, "gamma", float(self.gamma))


def kernel_matrix(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise kernel values, shape (len(a), len(b))."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"feature dimensions differ: {a.shape[1]} vs {b.shape[1]}")
    if spec.family == "linear":
        out = a @ b.T
    else:
        sq = (
            (a * a).sum(axis=1)[:, None]
            + (b * b).sum(axis=1)[None, :]
            - 2.0 * (a @ b.T)
        )
        np.maximum(sq, 0.0, out=sq)
        out = np.exp(-spec.gamma * sq)
    if not np.isfinite(out).all():
        raise ValueError("non-finite kernel value")
    return out


def kernel_eval(spec: KernelSpec, x: np.ndarray, z: np.ndarray) -> float:
    return float(kernel_matrix(spec, np.atleast_2d(x), np.atleast_2d(z))[0, 0])


@dataclass(frozen=True)
class GramPair:
    """Full Gram matrix over stacked rows plus its pair-difference form."""

    full: np.ndarray
    diff: np.ndarray


def pair_gram(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> GramPair:
    """Gram pair for rows (a_i, b_i).

    ``full`` is the (2m, 2m) kernel matrix over [a; b].  ``diff`` is the
    m x m matrix of k(b_i,b_j) - k(b_i,a_j) - k(a_i,b_j) + k(a_i,a_j),
    the kernel of the differences b - a in feature space.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m = a.shape[0]
    stacked = np.vstack([a, b])
    full = kernel_matrix(spec, stacked, stacked)
    k_aa = full[:m, :m]
    k_ab = full[:m, m:]
    k_bb = full[m:, m:]
    diff = k_bb - k_ab.T - k_ab + k_aa
    return GramPair(full, diff)


def gram(spec: KernelSpec, f: FlippedDataset) -> GramPair:
    """Gram pair for a flipped dataset (rows x_tilde, x_tilde_prime)."""
    return pair_gram(spec, f.x_tilde, f.x_tilde_prime)


def kernel_vector(spec: KernelSpec, f: FlippedDataset, x: np.ndarray) -> np.ndarray:
    """Kernel of one probe point against the 2m stacked training rows."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("probe point must be a 1-d vector")
    stacked = np.vstack([f.x_tilde, f.x_tilde_prime])
    return kernel_matrix(spec, stacked, x[None, :]).ravel()
