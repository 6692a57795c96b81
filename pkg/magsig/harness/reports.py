"""
Experiment reports: per-run digests, mean ± spread summaries, summary CSV and reproducibility comparison.
"""
from __future__ import annotations

import json
import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from dataclasses_json import DataClassJsonMixin

from ..errors import ConfigurationError
from ..evaluation import ConditionMeta, EvalReport

logger = logging.getLogger(__name__)

REPORT_NAME = "report.json"
SUMMARY_NAME = "summary.csv"
SUMMARY_COLUMNS = ["condition", "family", "accuracy", "auc", "mle_m", "max_err_m"]
TIMESTAMP_FIELDS = frozenset({"generated_at", "timing"})


@dataclass
class ReportDigest(DataClassJsonMixin):
    """Headline numbers of one EvalReport plus where the full report lives."""

    condition: ConditionMeta
    family: str
    seed: int
    requested: Optional[float]  # sweep value as configured
    value: Optional[float]  # sweep value as measured
    accuracy: float
    auc: float
    detection_accuracy: float
    frame_accuracy: float
    mle_m: Optional[float]
    max_error_m: Optional[float]
    matched: int
    missed: int
    false_alarms: int
    report_path: Optional[str] = None


@dataclass
class ConditionSummary(DataClassJsonMixin):
    condition: str
    family: str
    requested: Optional[float]
    value: Optional[float]  # mean measured condition value over seeds
    seeds: List[int]
    accuracy_mean: float
    accuracy_spread: float  # max - min over seeds
    auc_mean: float
    auc_spread: float
    mle_mean: Optional[float]
    max_err_mean: Optional[float]
    reference_accuracy: Optional[float] = None


@dataclass
class ExperimentReport(DataClassJsonMixin):
    experiment: str
    config: Dict[str, Any]
    summaries: List[ConditionSummary]
    runs: List[ReportDigest]
    failures: List[Dict[str, Any]] = field(default_factory=list)
    acceptance_failures: List[str] = field(default_factory=list)
    generated_at: Optional[str] = field(default=None, compare=False)
    timing: Optional[Dict[str, Any]] = field(default=None, compare=False)

    def summary(self, condition: str, family: str) -> Optional[ConditionSummary]:
        for s in self.summaries:
            if s.condition == condition and s.family == family:
                return s
        return None

    def family_summaries(self, family: str) -> List[ConditionSummary]:
        return [s for s in self.summaries if s.family == family]

    def condition_summaries(self, condition: str) -> List[ConditionSummary]:
        return [s for s in self.summaries if s.condition == condition]


def digest_report(
    report: EvalReport,
    seed: int,
    requested: Optional[float] = None,
    value: Optional[float] = None,
    report_path: Optional[str] = None,
) -> ReportDigest:
    return ReportDigest(
        condition=report.condition,
        family=report.family,
        seed=int(seed),
        requested=requested,
        value=value,
        accuracy=report.localization_accuracy,
        auc=report.macro_auc,
        detection_accuracy=report.detection_accuracy,
        frame_accuracy=report.frame_accuracy,
        mle_m=report.mle.mle_m,
        max_error_m=report.mle.max_error_m,
        matched=report.mle.matched,
        missed=report.mle.missed,
        false_alarms=report.mle.false_alarms,
        report_path=report_path,
    )


def _mean_or_none(values: Sequence[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else None


def summarize(runs: Sequence[ReportDigest]) -> List[ConditionSummary]:
    """Group runs by (condition, family) in first-seen order; mean ± spread across seeds."""
    groups: "OrderedDict[tuple, List[ReportDigest]]" = OrderedDict()
    for run in runs:
        groups.setdefault((run.condition.name, run.family), []).append(run)
    summaries = []
    for (condition, family), members in groups.items():
        accuracy = np.array([m.accuracy for m in members])
        auc = np.array([m.auc for m in members])
        summaries.append(
            ConditionSummary(
                condition=condition,
                family=family,
                requested=members[0].requested,
                value=_mean_or_none([m.value for m in members]),
                seeds=[m.seed for m in members],
                accuracy_mean=float(accuracy.mean()),
                accuracy_spread=float(accuracy.max() - accuracy.min()),
                auc_mean=float(auc.mean()),
                auc_spread=float(auc.max() - auc.min()),
                mle_mean=_mean_or_none([m.mle_m for m in members]),
                max_err_mean=_mean_or_none([m.max_error_m for m in members]),
                reference_accuracy=members[0].condition.reference_accuracy,
            )
        )
    return summaries


def experiment_report_to_json(report: ExperimentReport) -> str:
    return json.dumps(report.to_dict(encode_json=True), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_experiment_report(report: ExperimentReport, directory: Union[str, Path]) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / REPORT_NAME
    path.write_text(experiment_report_to_json(report), encoding="utf-8")
    write_summary_csv(report, directory / SUMMARY_NAME)
    logger.info("experiment report written: %s", path)
    return path


def load_experiment_report(path: Union[str, Path]) -> ExperimentReport:
    path = Path(path)
    if path.is_dir():
        path = path / REPORT_NAME
    if not path.exists():
        raise ConfigurationError(f"Experiment report not found: {path}")
    try:
        return ExperimentReport.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise ConfigurationError(f"Cannot parse experiment report {path}: {e}") from e


def summary_rows(report: ExperimentReport) -> List[Dict[str, Any]]:
    return [
        {
            "condition": s.condition,
            "family": s.family,
            "accuracy": s.accuracy_mean,
            "auc": s.auc_mean,
            "mle_m": s.mle_mean,
            "max_err_m": s.max_err_mean,
        }
        for s in report.summaries
    ]


def write_summary_csv(report: ExperimentReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(summary_rows(report), columns=SUMMARY_COLUMNS)
    frame.to_csv(path, index=False, float_format="%.6g", lineterminator="\n")
    return path


def _strip_timestamps(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _strip_timestamps(v) for k, v in value.items() if k not in TIMESTAMP_FIELDS}
    if isinstance(value, list):
        return [_strip_timestamps(v) for v in value]
    return value


def _as_payload(value: Any) -> Any:
    if isinstance(value, (str, Path)):
        path = Path(value)
        if path.is_dir():
            path = path / REPORT_NAME
        return json.loads(path.read_text(encoding="utf-8"))
    if isinstance(value, DataClassJsonMixin):
        return value.to_dict(encode_json=True)
    return value


def reports_equal_ignoring_timestamps(a: Any, b: Any) -> bool:
    """Compare two reports (objects, dicts or JSON paths) after dropping generated_at/timing at any depth."""
    left = json.dumps(_strip_timestamps(_as_payload(a)), sort_keys=True)
    right = json.dumps(_strip_timestamps(_as_payload(b)), sort_keys=True)
    return left == right
