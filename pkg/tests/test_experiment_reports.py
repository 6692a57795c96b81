"""
Experiment configuration, report summaries and reproducibility comparison
"""
import json

import pytest

from magsig.config import ExperimentConfig, MagsigSettings, load_experiment_config
from magsig.errors import ConfigurationError
from magsig.evaluation import ConditionMeta
from magsig.harness import (
    ExperimentReport,
    ReportDigest,
    decimation_factor,
    load_experiment_report,
    reports_equal_ignoring_timestamps,
    summarize,
    write_experiment_report,
)
from magsig.harness.reports import REPORT_NAME, SUMMARY_NAME


def _digest(seed, accuracy, condition="sir4dB", family="LSTM", mle=0.7):
    meta = ConditionMeta(name=condition, target_sir_db=4.0, measured_sir_db=4.1, seed=seed, reference_accuracy=86.0)
    return ReportDigest(
        condition=meta,
        family=family,
        seed=seed,
        requested=4.0,
        value=4.0 + 0.1 * seed,
        accuracy=accuracy,
        auc=0.9 + 0.01 * seed,
        detection_accuracy=96.0,
        frame_accuracy=90.0,
        mle_m=mle,
        max_error_m=None if mle is None else 1.5,
        matched=20,
        missed=4,
        false_alarms=2,
        report_path=f"seed{seed}/{condition}_{family}.json",
    )


def _report(generated_at="2026-01-01T00:00:00", timing=None, accuracy=84.0):
    runs = [_digest(0, accuracy), _digest(1, 88.0), _digest(0, 70.0, family="DNN", mle=None)]
    return ExperimentReport(
        experiment="sir_sweep",
        config={"seeds": [0, 1]},
        summaries=summarize(runs),
        runs=runs,
        generated_at=generated_at,
        timing=timing or {"total_s": 12.5},
    )


def test_summaries_group_by_condition_and_family():
    summaries = summarize(_report().runs)
    assert [(s.condition, s.family) for s in summaries] == [("sir4dB", "LSTM"), ("sir4dB", "DNN")]
    lstm = summaries[0]
    assert lstm.seeds == [0, 1]
    assert lstm.accuracy_mean == pytest.approx(86.0)
    assert lstm.accuracy_spread == pytest.approx(4.0)
    assert lstm.auc_mean == pytest.approx(0.905)
    assert lstm.value == pytest.approx(4.05)
    assert lstm.reference_accuracy == 86.0
    assert summaries[1].mle_mean is None


def test_report_files_round_trip(tmp_path):
    report = _report()
    path = write_experiment_report(report, tmp_path)
    assert path.name == REPORT_NAME
    assert load_experiment_report(tmp_path) == report
    assert load_experiment_report(path).summary("sir4dB", "DNN").accuracy_mean == 70.0

    lines = (tmp_path / SUMMARY_NAME).read_text(encoding="utf-8").splitlines()
    assert lines[0] == "condition,family,accuracy,auc,mle_m,max_err_m"
    assert lines[1].startswith("sir4dB,LSTM,86,")
    assert len(lines) == 3


def test_missing_or_broken_report(tmp_path):
    with pytest.raises(ConfigurationError):
        load_experiment_report(tmp_path / "nowhere")
    (tmp_path / REPORT_NAME).write_text("{", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_experiment_report(tmp_path)


def test_reports_compare_without_timestamps(tmp_path):
    first = _report()
    second = _report(generated_at="2026-06-30T12:00:00", timing={"total_s": 99.0, "workers": 4})
    assert first == second
    assert reports_equal_ignoring_timestamps(first, second)
    assert not reports_equal_ignoring_timestamps(first, _report(accuracy=83.0))

    a = write_experiment_report(first, tmp_path / "a")
    b = write_experiment_report(second, tmp_path / "b")
    assert reports_equal_ignoring_timestamps(a, tmp_path / "b")
    assert reports_equal_ignoring_timestamps(str(a.parent), str(b))


def test_nested_timestamps_are_ignored():
    left = {"experiment": "baseline", "runs": [{"generated_at": "x", "accuracy": 1.0}]}
    right = {"experiment": "baseline", "runs": [{"generated_at": "y", "accuracy": 1.0}]}
    assert reports_equal_ignoring_timestamps(left, right)


@pytest.mark.parametrize("rate,factor", [(120.0, 1), (60.0, 2), (30.0, 4), (20.0, 6)])
def test_decimation_factor(rate, factor):
    assert decimation_factor(120.0, rate) == factor


@pytest.mark.parametrize("rate", [50.0, 240.0, 0.0])
def test_decimation_factor_rejects_non_divisors(rate):
    with pytest.raises(ConfigurationError):
        decimation_factor(120.0, rate)


class TestExperimentConfig:
    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.seeds == [0, 1, 2]
        assert cfg.families == ["SVM", "SVM_PCA", "DNN", "RNN", "GRU", "LSTM"]
        assert cfg.sweep_families == ["LSTM"]
        assert cfg.sir_values == [8.0, 6.0, 4.0, 0.0]
        assert cfg.effective_train_stride == 8
        assert ExperimentConfig(full_scale=True).effective_train_stride == 1
        assert ExperimentConfig(full_scale=True).effective_gap_s >= 45.0

    def test_json_file_and_alias(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        path = tmp_path / "exp.json"
        path.write_text(json.dumps({"seeds": [4], "families": ["lstm", "svm"], "rates": [120, 60]}), encoding="utf-8")
        cfg = load_experiment_config(path, "decimate", MagsigSettings())
        assert cfg.experiment == "decimation"
        assert cfg.families == ["LSTM", "SVM"]
        assert cfg.rates == [120.0, 60.0]

    def test_toml_file(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        path = tmp_path / "exp.toml"
        path.write_text('experiment = "fewshot"\nshots = [10, 20]\nmax_epochs = 3\n', encoding="utf-8")
        cfg = load_experiment_config(path, settings=MagsigSettings())
        assert cfg.experiment == "fewshot"
        assert cfg.shots == [10, 20]
        assert cfg.max_epochs == 3

    def test_invalid_values(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        path = tmp_path / "bad.json"
        for payload in ({"families": ["CNN"]}, {"sir_values": [40.0]}, {"seeds": []}, {"paces": [5.0]}):
            path.write_text(json.dumps(payload), encoding="utf-8")
            with pytest.raises(ConfigurationError):
                load_experiment_config(path, settings=MagsigSettings())
        with pytest.raises(ConfigurationError):
            load_experiment_config(tmp_path / "absent.toml")
        with pytest.raises(ConfigurationError):
            load_experiment_config(None, "marathon", MagsigSettings())

    def test_environment_overrides(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("MAGSIG_SEED", "5")
        monkeypatch.setenv("MAGSIG_OUT", str(tmp_path / "out"))
        monkeypatch.setenv("MAGSIG_WORKERS", "2")
        cfg = load_experiment_config(None, "baseline")
        assert cfg.seeds == [5, 6, 7]
        assert cfg.output_dir == str(tmp_path / "out")
        assert cfg.workers == 2
