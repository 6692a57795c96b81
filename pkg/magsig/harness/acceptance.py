"""
Threshold gates per experiment. check_acceptance returns the failed checks; non-empty means exit code 2.
"""
from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

from .references import MAX_DEGRADATION_6DB, PROPOSED_MAX_ERROR_M

if TYPE_CHECKING:
    from .reports import ConditionSummary, ExperimentReport

logger = logging.getLogger(__name__)

ORDER_TOLERANCE = 2.0  # accuracy points between neighbouring families
FEWSHOT_TOLERANCE = 2.0

BASELINE_MIN_ACCURACY = 90.0
BASELINE_MAX_MLE_M = PROPOSED_MAX_ERROR_M
BASELINE_MAX_ERROR_M = 2.0
FAMILY_ORDER = ("LSTM", "GRU", "RNN", "DNN")

SIR_MAX_DROP_8_TO_6 = 2 * MAX_DEGRADATION_6DB
SIR_MIN_ACCURACY_0DB = 70.0
FEWSHOT_20_WITHIN_30 = 5.0
PACE_MAX_SPREAD = 5.0

_EXACT_FIELDS = ("accuracy", "auc", "detection_accuracy", "frame_accuracy", "mle_m", "max_error_m")


def _primary_family(report: "ExperimentReport") -> Optional[str]:
    families = list(dict.fromkeys(s.family for s in report.summaries))
    if not families:
        return None
    return "LSTM" if "LSTM" in families else families[0]


def _sweep_points(report: "ExperimentReport", family: str) -> List["ConditionSummary"]:
    return [s for s in report.family_summaries(family) if s.condition != "baseline" and s.requested is not None]


def _at(points: Sequence["ConditionSummary"], requested: float) -> Optional["ConditionSummary"]:
    for s in points:
        if abs(s.requested - requested) < 1e-9:
            return s
    return None


def _monotone(points: Sequence["ConditionSummary"], label: str, tolerance: float = 0.0) -> List[str]:
    """Accuracy along ascending `requested` must not fall by more than tolerance between neighbours."""
    failed = []
    ordered = sorted(points, key=lambda s: s.requested)
    for lo, hi in zip(ordered, ordered[1:]):
        if hi.accuracy_mean < lo.accuracy_mean - tolerance:
            failed.append(
                f"{label}: accuracy falls from {lo.accuracy_mean:.2f} at {lo.requested:g} "
                f"to {hi.accuracy_mean:.2f} at {hi.requested:g}"
            )
    return failed


def check_baseline(report: "ExperimentReport") -> List[str]:
    failed = []
    acc: Dict[str, float] = {s.family: s.accuracy_mean for s in report.condition_summaries("baseline")}
    lstm = report.summary("baseline", "LSTM")
    if lstm is not None:
        if lstm.accuracy_mean < BASELINE_MIN_ACCURACY:
            failed.append(f"baseline: LSTM accuracy {lstm.accuracy_mean:.2f} < {BASELINE_MIN_ACCURACY}")
        if lstm.mle_mean is None or lstm.mle_mean > BASELINE_MAX_MLE_M:
            failed.append(f"baseline: LSTM MLE {lstm.mle_mean} m exceeds {BASELINE_MAX_MLE_M} m")
        if lstm.max_err_mean is None or lstm.max_err_mean > BASELINE_MAX_ERROR_M:
            failed.append(f"baseline: LSTM max error {lstm.max_err_mean} m exceeds {BASELINE_MAX_ERROR_M} m")

    chain: List[Tuple[str, float]] = [(f, acc[f]) for f in FAMILY_ORDER if f in acc]
    svms = [f for f in ("SVM", "SVM_PCA") if f in acc]
    if svms:
        best = max(svms, key=lambda f: acc[f])
        chain.append((best, acc[best]))
    for (upper, a_upper), (lower, a_lower) in zip(chain, chain[1:]):
        if a_upper + ORDER_TOLERANCE < a_lower:
            failed.append(f"baseline: {upper} ({a_upper:.2f}) ranks below {lower} ({a_lower:.2f})")
    return failed


def check_sir_sweep(report: "ExperimentReport") -> List[str]:
    family = _primary_family(report)
    if family is None:
        return []
    points = _sweep_points(report, family)
    failed = _monotone(points, f"sir_sweep/{family}")
    at8, at6, at0 = _at(points, 8.0), _at(points, 6.0), _at(points, 0.0)
    if at8 is not None and at6 is not None and at8.accuracy_mean - at6.accuracy_mean > SIR_MAX_DROP_8_TO_6:
        failed.append(
            f"sir_sweep/{family}: 8->6 dB drop {at8.accuracy_mean - at6.accuracy_mean:.2f} > {SIR_MAX_DROP_8_TO_6}"
        )
    if at0 is not None and at0.accuracy_mean < SIR_MIN_ACCURACY_0DB:
        failed.append(f"sir_sweep/{family}: accuracy at 0 dB {at0.accuracy_mean:.2f} < {SIR_MIN_ACCURACY_0DB}")
    return failed


def check_decimation(report: "ExperimentReport") -> List[str]:
    family = _primary_family(report)
    if family is None:
        return []
    points = _sweep_points(report, family)
    failed = _monotone(points, f"decimation/{family}")

    baseline = {(r.family, r.seed): r for r in report.runs if r.condition.name == "baseline"}
    for run in report.runs:
        ref = baseline.get((run.family, run.seed))
        if run.condition.name == "baseline" or ref is None or run.requested is None:
            continue
        if abs(run.requested - ref.requested) > 1e-9:
            continue
        diffs = [name for name in _EXACT_FIELDS if getattr(run, name) != getattr(ref, name)]
        if diffs:
            failed.append(
                f"decimation/{run.family} seed {run.seed}: {run.requested:g} Hz differs from baseline in {diffs}"
            )
    return failed


def check_fewshot(report: "ExperimentReport") -> List[str]:
    family = _primary_family(report)
    if family is None:
        return []
    points = _sweep_points(report, family)
    failed = _monotone(points, f"fewshot/{family}", FEWSHOT_TOLERANCE)
    at20, at30 = _at(points, 20), _at(points, 30)
    if at20 is not None and at30 is not None and abs(at30.accuracy_mean - at20.accuracy_mean) > FEWSHOT_20_WITHIN_30:
        failed.append(
            f"fewshot/{family}: 20 shots ({at20.accuracy_mean:.2f}) not within "
            f"{FEWSHOT_20_WITHIN_30} of 30 shots ({at30.accuracy_mean:.2f})"
        )
    return failed


def check_pace_sweep(report: "ExperimentReport") -> List[str]:
    family = _primary_family(report)
    if family is None:
        return []
    points = _sweep_points(report, family)
    failed = []
    if points:
        accuracies = [s.accuracy_mean for s in points]
        spread = max(accuracies) - min(accuracies)
        if spread > PACE_MAX_SPREAD:
            failed.append(f"pace_sweep/{family}: accuracy spread {spread:.2f} > {PACE_MAX_SPREAD}")
    for run in report.runs:
        if run.mle_m is None:
            failed.append(f"pace_sweep/{run.family} {run.condition.name} seed {run.seed}: no MLE")
    return failed


_CHECKS = {
    "baseline": check_baseline,
    "sir_sweep": check_sir_sweep,
    "decimation": check_decimation,
    "fewshot": check_fewshot,
    "pace_sweep": check_pace_sweep,
}


def check_acceptance(report: "ExperimentReport") -> List[str]:
    check = _CHECKS.get(report.experiment)
    if check is None:
        return [f"no acceptance gates for experiment {report.experiment!r}"]
    failed = check(report)
    for line in failed:
        logger.warning("acceptance: %s", line)
    return failed
