"""
One-vs-rest least-squares SVM with an RBF kernel approximated by random Fourier features.

In the primal, the least-squares SVM is ridge regression on the feature map with +/-1 targets:
    min_w,b  1/2 |w|^2 + C/2 * sum_i (y_i - w·z_i - b)^2
which is one linear solve shared by all seven one-vs-rest problems.
"""
from __future__ import annotations

import logging
from typing import Dict, Optional, Sequence

import numpy as np

from ..errors import TrainingError
from .networks import cross_entropy, softmax
from .spec import ModelSpec

logger = logging.getLogger(__name__)

Params = Dict[str, np.ndarray]

DEFAULT_TEMPERATURES = tuple(np.logspace(-3, 1, 41))


def rff_features(params: Params, X: np.ndarray) -> np.ndarray:
    """z(x) = sqrt(2/D)·cos(x·W + b), so that z(x)·z(y) ≈ exp(-gamma·|x - y|²)."""
    W = params["rff_W"]
    D = W.shape[1]
    return np.sqrt(2.0 / D) * np.cos(np.asarray(X, dtype=float) @ W + params["rff_b"])


def fit_svm(X: np.ndarray, y: np.ndarray, spec: ModelSpec, rng: np.random.Generator) -> Params:
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    gamma = spec.rbf_gamma if spec.rbf_gamma is not None else 1.0 / d
    params: Params = {
        "rff_W": rng.normal(scale=np.sqrt(2.0 * gamma), size=(d, spec.rff_dim)),
        "rff_b": rng.uniform(0.0, 2.0 * np.pi, size=spec.rff_dim),
    }
    Z = np.hstack([rff_features(params, X), np.ones((n, 1))])

    targets = -np.ones((n, spec.n_classes))
    targets[np.arange(n), np.asarray(y, dtype=int)] = 1.0

    ridge = np.full(Z.shape[1], 1.0 / spec.svm_c)
    ridge[-1] = 0.0  # bias is not regularized
    gram = Z.T @ Z + np.diag(ridge)
    try:
        params["coef"] = np.linalg.solve(gram, Z.T @ targets)
    except np.linalg.LinAlgError as e:
        raise TrainingError(f"LS-SVM system is singular: {e}") from e
    logger.debug("LS-SVM fitted: n=%d, d=%d, D=%d, gamma=%.4g", n, d, spec.rff_dim, gamma)
    return params


def svm_scores(params: Params, X: np.ndarray) -> np.ndarray:
    Z = rff_features(params, X)
    coef = params["coef"]
    return Z @ coef[:-1] + coef[-1]


def svm_proba(params: Params, X: np.ndarray, temperature: float) -> np.ndarray:
    return softmax(svm_scores(params, X) / temperature)


def calibrate_temperature(scores: np.ndarray, y: np.ndarray, grid: Optional[Sequence[float]] = None) -> float:
    """Softmax temperature with the lowest cross-entropy on held-out scores."""
    grid = tuple(grid) if grid else DEFAULT_TEMPERATURES
    losses = [cross_entropy(scores / T, y) for T in grid]
    best = float(grid[int(np.argmin(losses))])
    logger.debug("SVM temperature %.4g (cross-entropy %.4f)", best, min(losses))
    return best
