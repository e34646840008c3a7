"""Kernel functions and Gram matrix construction for the SVM solver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KERNEL_KINDS = ("linear", "rbf")

# Row-block size for pairwise distance computation; keeps the broadcast
# temporaries bounded while staying vectorized.
_CHUNK = 256


@dataclass(frozen=True)
class KernelSpec:
    """Kernel selection: linear dot product or Gaussian RBF.

    The RBF convention is K(x, y) = exp(-||x - y||^2 / (2 sigma^2)); sigma is
    the bandwidth, required for rbf and forbidden for linear.
    """

    kind: str = "rbf"
    sigma: float | None = 0.5

    def __post_init__(self) -> None:
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}, expected one of {KERNEL_KINDS}")
        if self.kind == "rbf":
            if self.sigma is None or not np.isfinite(self.sigma) or self.sigma <= 0:
                raise ValueError("rbf kernel requires a positive finite sigma")
        elif self.sigma is not None:
            raise ValueError("linear kernel takes no sigma")

    def describe(self) -> str:
        if self.kind == "rbf":
            return f"rbf(sigma={self.sigma}, K=exp(-||x-y||^2/(2*sigma^2)))"
        return "linear(K=dot(x,y))"


def linear_kernel() -> KernelSpec:
    return KernelSpec(kind="linear", sigma=None)


def rbf_kernel(sigma: float) -> KernelSpec:
    return KernelSpec(kind="rbf", sigma=float(sigma))


def kernel_value(spec: KernelSpec, x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("kernel_value expects two 1-D vectors of equal length")
    if spec.kind == "linear":
        return float(np.dot(x, y))
    d = x - y
    return float(np.exp(-np.dot(d, d) / (2.0 * spec.sigma**2)))


def cross_kernel(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kernel matrix K[i, j] = K(A[i], B[j]) of shape (len(A), len(B))."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[1]:
        raise ValueError("cross_kernel expects 2-D arrays with matching feature counts")
    if spec.kind == "linear":
        return A @ B.T
    out = np.empty((A.shape[0], B.shape[0]))
    denom = 2.0 * spec.sigma**2
    for start in range(0, A.shape[0], _CHUNK):
        block = A[start : start + _CHUNK]
        # exact squared distances via explicit differences; the expanded
        # x.x + y.y - 2x.y form can go slightly negative
        sq = ((block[:, None, :] - B[None, :, :]) ** 2).sum(axis=2)
        out[start : start + _CHUNK] = np.exp(-sq / denom)
    return out


def gram_matrix(spec: KernelSpec, X: np.ndarray) -> np.ndarray:
    """Symmetric kernel matrix of X against itself.

    Symmetry is enforced by mirroring the upper triangle, and the RBF
    diagonal is set to exactly 1.0, so downstream code can rely on both.
    """
    G = cross_kernel(spec, X, X)
    upper = np.triu(G)
    G = upper + np.triu(G, 1).T
    if spec.kind == "rbf":
        np.fill_diagonal(G, 1.0)
    return G
