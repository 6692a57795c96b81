"""
EvalReport: everything measured for one (family, condition) pair, JSON via dataclasses-json.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from dataclasses_json import DataClassJsonMixin

from ..config import FramingDefaults
from ..errors import EvaluationError
from .confusion import confusion_matrix
from .localization import MLEResult, detect_passes, mean_localization_error, merge_mle
from .roc import RocCurve, class_rocs, detection_roc

logger = logging.getLogger(__name__)


@dataclass
class ConditionMeta(DataClassJsonMixin):
    """The condition a report was measured under; values are the ones actually used."""

    name: str = "baseline"
    target_sir_db: Optional[float] = None
    measured_sir_db: Optional[float] = None
    sample_rate: Optional[float] = None
    shots: Optional[int] = None
    pace: Optional[float] = None
    seed: Optional[int] = None
    reference_accuracy: Optional[float] = None


@dataclass
class EvalReport(DataClassJsonMixin):
    family: str
    condition: ConditionMeta
    n_frames: int
    class_rocs: List[RocCurve]
    macro_auc: float
    detection_roc: RocCurve
    localization_accuracy: float  # percent
    detection_accuracy: float  # percent
    frame_accuracy: float  # percent, argmax
    mle: MLEResult
    confusion: List[List[int]]
    generated_at: Optional[str] = field(default=None, compare=False)

    @property
    def mle_m(self) -> Optional[float]:
        return self.mle.mle_m

    @property
    def max_error_m(self) -> Optional[float]:
        return self.mle.max_error_m


def build_eval_report(
    probs: np.ndarray,
    labels: np.ndarray,
    frame_spans: np.ndarray,
    recording_ids: Sequence[str],
    pass_events: Dict[str, list],
    condition: ConditionMeta,
    family: str,
    pace: Optional[float] = None,
    gate_s: float = FramingDefaults.WINDOW,
) -> EvalReport:
    """
    Frame-level ROC/accuracy plus event-level MLE. Rows must be grouped per recording in
    chronological order; recording_ids[k] names the recording of row k.
    """
    probs = np.asarray(probs, dtype=float)
    labels = np.asarray(labels, dtype=int)
    frame_spans = np.asarray(frame_spans, dtype=float)
    recording_ids = np.asarray(recording_ids)
    if len(probs) != len(labels) or len(labels) != len(frame_spans) or len(labels) != len(recording_ids):
        raise EvaluationError("probs, labels, spans and recording ids must have one row per frame")

    curves = class_rocs(probs, labels)
    detection = detection_roc(probs, labels)
    predictions = np.argmax(probs, axis=1)

    per_recording = []
    for rec_id in dict.fromkeys(recording_ids.tolist()):
        rows = np.flatnonzero(recording_ids == rec_id)
        events = detect_passes(predictions[rows], frame_spans[rows])
        per_recording.append(mean_localization_error(events, pass_events.get(rec_id, []), pace=pace, gate_s=gate_s))

    return EvalReport(
        family=family,
        condition=condition,
        n_frames=int(len(labels)),
        class_rocs=curves,
        macro_auc=float(np.mean([c.auc for c in curves])),
        detection_roc=detection,
        localization_accuracy=100.0 * float(np.mean([c.balanced_accuracy for c in curves])),
        detection_accuracy=100.0 * detection.balanced_accuracy,
        frame_accuracy=100.0 * float(np.mean(predictions == labels)),
        mle=merge_mle(per_recording),
        confusion=confusion_matrix(predictions, labels).tolist(),
    )


def report_to_json(report: EvalReport) -> str:
    return json.dumps(report.to_dict(encode_json=True), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_eval_report(report: EvalReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report_to_json(report), encoding="utf-8")
    return path


def load_eval_report(path: Union[str, Path]) -> EvalReport:
    return EvalReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_roc_csvs(report: EvalReport, directory: Union[str, Path], prefix: str = "") -> List[Path]:
    """One `fpr,tpr,threshold` CSV per class curve plus the detection curve."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for curve in [*report.class_rocs, report.detection_roc]:
        name = "detection" if curve.label == "detection" else f"class{curve.label}"
        path = directory / f"{prefix}roc_{name}.csv"
        pd.DataFrame({"fpr": curve.fpr, "tpr": curve.tpr, "threshold": curve.thresholds}).to_csv(
            path, index=False, float_format="%.9g"
        )
        written.append(path)
    logger.debug("ROC CSVs written to %s (%d files)", directory, len(written))
    return written
