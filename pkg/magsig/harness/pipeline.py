"""
Glue between datasets, models and evaluation: train one family, evaluate one model on a test set.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from ..config import FramingDefaults, TrainingDefaults
from ..errors import EvaluationError
from ..evaluation import ConditionMeta, EvalReport, build_eval_report, write_eval_report, write_roc_csvs
from ..features import FeatureMatrix
from ..models import ModelFamily, ModelSpec, TrainConfig, TrainedModel, export_history, predict_proba, save_model, train
from .datasets import Dataset

logger = logging.getLogger(__name__)


def model_spec(family: Union[str, ModelFamily], overrides: Optional[Dict[str, Any]] = None) -> ModelSpec:
    return ModelSpec(family=ModelFamily.parse(family), **(overrides or {}))


def train_family(
    data: Union[Dataset, FeatureMatrix],
    family: Union[str, ModelFamily],
    seed: int = 0,
    max_epochs: int = TrainingDefaults.MAX_EPOCHS,
    overrides: Optional[Dict[str, Any]] = None,
) -> TrainedModel:
    matrix = data.matrix if isinstance(data, Dataset) else data
    spec = model_spec(family, overrides)
    model = train(matrix, spec, TrainConfig(seed=seed, max_epochs=max_epochs))
    logger.info(
        "%s trained (seed=%d, %d epochs, best val acc %s)",
        spec.family.value,
        seed,
        len(model.history),
        "n/a" if model.best_val_acc is None else f"{model.best_val_acc:.3f}",
    )
    return model


def evaluate_model(
    model: TrainedModel,
    dataset: Dataset,
    condition: Optional[ConditionMeta] = None,
    gate_s: float = FramingDefaults.WINDOW,
) -> EvalReport:
    """Frame-level ROC/accuracy on the featurized test set plus per-recording pass detection for MLE."""
    if not dataset.features:
        raise EvaluationError("test dataset is not featurized")
    matrix = dataset.matrix
    if len(matrix) == 0:
        raise EvaluationError("test dataset has no feature vectors")
    probs = predict_proba(model, matrix.X)
    report = build_eval_report(
        probs,
        matrix.y,
        matrix.spans,
        dataset.row_recording_ids,
        dataset.pass_events,
        condition or ConditionMeta(),
        family=model.family.value,
        gate_s=gate_s,
    )
    logger.info(
        "%s @ %s: accuracy %.2f%%, AUC %.4f, MLE %s",
        report.family,
        report.condition.name,
        report.localization_accuracy,
        report.macro_auc,
        "n/a" if report.mle_m is None else f"{report.mle_m:.3f} m",
    )
    return report


def save_model_bundle(model: TrainedModel, directory: Union[str, Path], stem: Optional[str] = None) -> Path:
    """`<stem>.npz` plus `<stem>.history.csv`."""
    directory = Path(directory)
    stem = stem or model.family.value
    path = save_model(model, directory / f"{stem}.npz")
    export_history(model, directory / f"{stem}.history.csv")
    return path


def save_report_bundle(report: EvalReport, directory: Union[str, Path], stem: str) -> Path:
    """`<stem>.json` plus `<stem>_roc_*.csv`."""
    directory = Path(directory)
    path = write_eval_report(report, directory / f"{stem}.json")
    write_roc_csvs(report, directory, prefix=f"{stem}_")
    return path
