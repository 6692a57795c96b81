import numpy as np
from sklearn.metrics import confusion_matrix as sk_confusion_matrix

from ..models.spec import N_CLASSES


def confusion_matrix(predictions: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """7x7 counts, rows = truth, columns = prediction."""
    truth = np.asarray(labels, dtype=int)
    predicted = np.asarray(predictions, dtype=int)
    return sk_confusion_matrix(truth, predicted, labels=list(range(N_CLASSES)))
