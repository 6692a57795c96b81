"""
ROC curves and the localization-accuracy measure (best balanced TPR/TNR over thresholds).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np
from dataclasses_json import DataClassJsonMixin
from sklearn.metrics import auc as sk_auc
from sklearn.metrics import roc_curve as sk_roc_curve

from ..errors import EvaluationError
from ..models.spec import N_CLASSES


@dataclass
class RocCurve(DataClassJsonMixin):
    label: str  # class id as text, or "detection"
    fpr: List[float]
    tpr: List[float]
    thresholds: List[float]
    auc: float

    @property
    def balanced_accuracy(self) -> float:
        """max over thresholds of (TPR + TNR) / 2"""
        tpr = np.asarray(self.tpr)
        fpr = np.asarray(self.fpr)
        return float(np.max((tpr + 1.0 - fpr) / 2.0))


def roc_curve(scores: np.ndarray, labels: np.ndarray, positive, label: str = "") -> RocCurve:
    """One-vs-rest ROC of `positive` over every distinct score threshold, with trapezoidal AUC."""
    scores = np.asarray(scores, dtype=float)
    truth = np.asarray(labels) == positive
    if truth.all() or not truth.any():
        raise EvaluationError(f"ROC for class {positive!r} needs both positive and negative frames")
    fpr, tpr, thresholds = sk_roc_curve(truth, scores, drop_intermediate=False)
    thresholds = np.asarray(thresholds, dtype=float)
    # Leading threshold is +inf (nothing predicted positive); keep the JSON finite
    thresholds[~np.isfinite(thresholds)] = float(scores.max()) + 1.0
    return RocCurve(
        label=label or str(positive),
        fpr=fpr.tolist(),
        tpr=tpr.tolist(),
        thresholds=thresholds.tolist(),
        auc=float(sk_auc(fpr, tpr)),
    )


def class_rocs(probs: np.ndarray, labels: np.ndarray) -> List[RocCurve]:
    """One-vs-rest curves for every class that has both positives and negatives in `labels`."""
    probs = np.asarray(probs, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if len(np.unique(labels)) < 2:
        raise EvaluationError("evaluation labels hold a single class")
    return [
        roc_curve(probs[:, c], labels, c)
        for c in range(N_CLASSES)
        if (labels == c).any() and (labels != c).any()
    ]


def localization_accuracy(probs: np.ndarray, labels: np.ndarray) -> float:
    """Macro average of per-class best balanced accuracy, in percent."""
    curves = class_rocs(probs, labels)
    return 100.0 * float(np.mean([c.balanced_accuracy for c in curves]))


def macro_auc(probs: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean([c.auc for c in class_rocs(probs, labels)]))


def detection_roc(probs: np.ndarray, labels: np.ndarray) -> RocCurve:
    """Any structure vs H0, scored by 1 - P(H0)."""
    probs = np.asarray(probs, dtype=float)
    present = (np.asarray(labels) != 0).astype(int)
    return roc_curve(1.0 - probs[:, 0], present, 1, label="detection")


def detection_accuracy(probs: np.ndarray, labels: np.ndarray) -> float:
    return 100.0 * detection_roc(probs, labels).balanced_accuracy
