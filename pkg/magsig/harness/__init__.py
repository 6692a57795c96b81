"""
Наборы данных, конвейер обучения/оценки и эксперименты устойчивости
"""
from .acceptance import check_acceptance
from .datasets import (
    Dataset,
    DatasetManifest,
    RecordingEntry,
    build_test_set,
    build_training_set,
    featurize_dataset,
    load_dataset,
    load_manifest,
    verify_manifest,
    write_manifest,
)
from .experiments import (
    EXPERIMENTS,
    decimation_factor,
    run_baseline,
    run_decimation,
    run_experiment,
    run_fewshot,
    run_pace_sweep,
    run_sir_sweep,
)
from .pipeline import evaluate_model, save_model_bundle, save_report_bundle, train_family
from .reports import (
    ConditionSummary,
    ExperimentReport,
    ReportDigest,
    load_experiment_report,
    reports_equal_ignoring_timestamps,
    summarize,
    write_experiment_report,
    write_summary_csv,
)
from .runlog import append_run_event, read_run_events

__all__ = [
    "check_acceptance",
    "Dataset",
    "DatasetManifest",
    "RecordingEntry",
    "build_test_set",
    "build_training_set",
    "featurize_dataset",
    "load_dataset",
    "load_manifest",
    "verify_manifest",
    "write_manifest",
    "EXPERIMENTS",
    "decimation_factor",
    "run_baseline",
    "run_decimation",
    "run_experiment",
    "run_fewshot",
    "run_pace_sweep",
    "run_sir_sweep",
    "evaluate_model",
    "save_model_bundle",
    "save_report_bundle",
    "train_family",
    "ConditionSummary",
    "ExperimentReport",
    "ReportDigest",
    "load_experiment_report",
    "reports_equal_ignoring_timestamps",
    "summarize",
    "write_experiment_report",
    "write_summary_csv",
    "append_run_event",
    "read_run_events",
]
