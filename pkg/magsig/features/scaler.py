from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from ..errors import DimensionError, PreconditionError


@dataclass
class FeatureScaler:
    """Per-dimension z-score; zero-variance dimensions are only centred."""

    mean: np.ndarray
    std: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.mean)

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.dim:
            raise DimensionError(f"scaler expects {self.dim} features, got {X.shape[-1]}")
        scale = np.where(self.std > 0, self.std, 1.0)
        return (X - self.mean) / scale

    def to_dict(self) -> Dict[str, Any]:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FeatureScaler":
        return cls(np.asarray(data["mean"], dtype=float), np.asarray(data["std"], dtype=float))


def fit_scaler(X: np.ndarray) -> FeatureScaler:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or len(X) < 2:
        raise PreconditionError("fit_scaler needs at least 2 training vectors")
    return FeatureScaler(mean=X.mean(axis=0), std=X.std(axis=0))


def apply_scaler(scaler: FeatureScaler, X: np.ndarray) -> np.ndarray:
    return scaler.transform(X)
