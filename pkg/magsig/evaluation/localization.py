"""
From frame predictions to pass detections, and the localization error against ground truth.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Optional, Sequence

import numpy as np
from dataclasses_json import DataClassJsonMixin

from ..config import FramingDefaults
from ..errors import EvaluationError

if TYPE_CHECKING:
    from ..fieldsim.recording import PassEvent

logger = logging.getLogger(__name__)

MIN_RUN = 3


@dataclass(frozen=True)
class DetectionEvent(DataClassJsonMixin):
    structure_id: int
    time: float  # s, center of the run's median frame
    first_row: int
    last_row: int


@dataclass
class MLEResult(DataClassJsonMixin):
    mle_m: Optional[float]
    max_error_m: Optional[float]
    matched: int
    missed: int
    false_alarms: int
    errors_m: List[float]


def detect_passes(predictions: np.ndarray, spans: np.ndarray, min_run: int = MIN_RUN) -> List[DetectionEvent]:
    """Maximal runs of >= min_run consecutive rows with one non-zero label become one event."""
    predictions = np.asarray(predictions, dtype=int)
    spans = np.asarray(spans, dtype=float).reshape(-1, 2)
    events: List[DetectionEvent] = []
    if len(predictions) == 0:
        return events
    # Run boundaries where the label changes
    edges = np.flatnonzero(np.diff(predictions)) + 1
    starts = np.concatenate([[0], edges])
    ends = np.concatenate([edges, [len(predictions)]])
    for start, end in zip(starts, ends):
        label = int(predictions[start])
        if label == 0 or end - start < min_run:
            continue
        median = start + (end - start - 1) // 2
        events.append(DetectionEvent(label, float(spans[median].mean()), int(start), int(end - 1)))
    return events


def mean_localization_error(
    events: Sequence[DetectionEvent],
    pass_events: Sequence["PassEvent"],
    pace: Optional[float] = None,
    gate_s: float = FramingDefaults.WINDOW,
) -> MLEResult:
    """
    Greedy one-to-one matching by smallest time offset; a pair needs the same structure id and a
    detection inside the pass span widened by gate_s. Error = pace x |detection - closest approach|.
    pace=None uses the pace recorded with each pass.
    """
    if pace is not None and not pace > 0:
        raise EvaluationError(f"pace must be positive, got {pace}")
    candidates = []
    for e_idx, event in enumerate(events):
        for p_idx, true_pass in enumerate(pass_events):
            if event.structure_id != true_pass.structure_id:
                continue
            if true_pass.span[0] - gate_s <= event.time <= true_pass.span[1] + gate_s:
                candidates.append((abs(event.time - true_pass.closest_approach_time), e_idx, p_idx))
    candidates.sort()

    used_events, used_passes = set(), set()
    errors: List[float] = []
    for offset, e_idx, p_idx in candidates:
        if e_idx in used_events or p_idx in used_passes:
            continue
        speed = pace if pace is not None else pass_events[p_idx].pace
        if not speed > 0:
            raise EvaluationError(f"pass {p_idx} has no positive pace; pass pace explicitly")
        used_events.add(e_idx)
        used_passes.add(p_idx)
        errors.append(float(speed * offset))

    result = MLEResult(
        mle_m=float(np.mean(errors)) if errors else None,
        max_error_m=float(np.max(errors)) if errors else None,
        matched=len(errors),
        missed=len(pass_events) - len(used_passes),
        false_alarms=len(events) - len(used_events),
        errors_m=errors,
    )
    logger.debug("MLE: matched=%d missed=%d false_alarms=%d", result.matched, result.missed, result.false_alarms)
    return result


def merge_mle(results: Sequence[MLEResult]) -> MLEResult:
    """Pool matched errors of several recordings."""
    errors = [e for r in results for e in r.errors_m]
    return MLEResult(
        mle_m=float(np.mean(errors)) if errors else None,
        max_error_m=float(np.max(errors)) if errors else None,
        matched=sum(r.matched for r in results),
        missed=sum(r.missed for r in results),
        false_alarms=sum(r.false_alarms for r in results),
        errors_m=errors,
    )
