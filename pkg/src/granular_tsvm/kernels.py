"""Linear and Gaussian kernels and Gram-matrix assembly."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KERNEL_KINDS = ("linear", "gaussian")

# rows per block in gram(); bounds temporary memory for large X
_ROW_BLOCK = 1024


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "linear"
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"kernel kind must be one of {KERNEL_KINDS}")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def to_dict(self):
        return {"kind": self.kind, "sigma": float(self.sigma)}

    @classmethod
    def from_dict(cls, obj):
        return cls(obj["kind"], float(obj.get("sigma", 1.0)))


def kernel_eval(spec: KernelSpec, x, y) -> float:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if spec.kind == "linear":
        return float(x @ y)
    diff = x - y
    return float(np.exp(-(diff @ diff) / (2.0 * spec.sigma ** 2)))


def gram(spec: KernelSpec, X, Y) -> np.ndarray:
    """Kernel matrix with entry (i, j) = K(X_i, Y_j)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[1] != Y.shape[1]:
        raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    if spec.kind == "linear":
        return X @ Y.T
    out = np.empty((X.shape[0], Y.shape[0]))
    yy = np.einsum("ij,ij->i", Y, Y)
    denom = 2.0 * spec.sigma ** 2
    for s in range(0, X.shape[0], _ROW_BLOCK):
        Xb = X[s:s + _ROW_BLOCK]
        sq = np.einsum("ij,ij->i", Xb, Xb)[:, None] + yy[None, :] - 2.0 * Xb @ Y.T
        np.maximum(sq, 0.0, out=sq)
        out[s:s + _ROW_BLOCK] = np.exp(-sq / denom)
    return out
