from .confusion import confusion_matrix
from .localization import DetectionEvent, MLEResult, detect_passes, mean_localization_error, merge_mle
from .report import (
    ConditionMeta,
    EvalReport,
    build_eval_report,
    load_eval_report,
    report_to_json,
    write_eval_report,
    write_roc_csvs,
)
from .roc import (
    RocCurve,
    class_rocs,
    detection_accuracy,
    detection_roc,
    localization_accuracy,
    macro_auc,
    roc_curve,
)

__all__ = [
    "ConditionMeta",
    "DetectionEvent",
    "EvalReport",
    "MLEResult",
    "RocCurve",
    "build_eval_report",
    "class_rocs",
    "confusion_matrix",
    "detect_passes",
    "detection_accuracy",
    "detection_roc",
    "load_eval_report",
    "localization_accuracy",
    "macro_auc",
    "mean_localization_error",
    "merge_mle",
    "report_to_json",
    "roc_curve",
    "write_eval_report",
    "write_roc_csvs",
]
