from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, DimensionError


@dataclass
class PCABasis:
    mean: np.ndarray  # (d,)
    components: np.ndarray  # (d, k), orthonormal columns
    explained_variance: np.ndarray  # (k,), non-increasing
    total_variance: float = 0.0  # over all axes, not only the kept k

    @property
    def k(self) -> int:
        return self.components.shape[1]

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        total = self.total_variance
        return self.explained_variance / total if total > 0 else np.zeros_like(self.explained_variance)


def pca_fit(X: np.ndarray, k: int) -> PCABasis:
    """Principal axes from the SVD of the centred data; each axis has its largest entry positive."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionError("pca_fit expects a 2-D matrix")
    n, d = X.shape
    if not 1 <= k <= min(n, d):
        raise ConfigurationError(f"k must lie in [1, {min(n, d)}], got {k}")
    mean = X.mean(axis=0)
    _, s, vt = np.linalg.svd(X - mean, full_matrices=False)
    components = vt[:k].T
    flip = np.sign(components[np.argmax(np.abs(components), axis=0), np.arange(k)])
    flip[flip == 0] = 1.0
    components = components * flip
    variance = s * s / max(n - 1, 1)
    return PCABasis(
        mean=mean,
        components=components,
        explained_variance=variance[:k],
        total_variance=float(variance.sum()),
    )


def pca_transform(basis: PCABasis, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != len(basis.mean):
        raise DimensionError(f"PCA basis expects {len(basis.mean)} features, got {X.shape[-1]}")
    return (X - basis.mean) @ basis.components


def pca_inverse(basis: PCABasis, Z: np.ndarray) -> np.ndarray:
    return np.asarray(Z, dtype=float) @ basis.components.T + basis.mean
