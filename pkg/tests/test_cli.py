import json

import pytest

from magsig.cli import EXIT_ERROR, EXIT_OK, build_parser, main
from magsig.evaluation import ConditionMeta
from magsig.harness import ExperimentReport, ReportDigest, summarize, write_experiment_report


def _write_report(directory, accuracy=91.0):
    digest = ReportDigest(
        condition=ConditionMeta(name="baseline", seed=0),
        family="LSTM",
        seed=0,
        requested=None,
        value=8.1,
        accuracy=accuracy,
        auc=0.97,
        detection_accuracy=96.0,
        frame_accuracy=90.0,
        mle_m=0.8,
        max_error_m=1.6,
        matched=24,
        missed=0,
        false_alarms=0,
    )
    report = ExperimentReport(experiment="baseline", config={}, summaries=summarize([digest]), runs=[digest])
    return write_experiment_report(report, directory)


@pytest.fixture(autouse=True)
def _isolated_env(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in ("MAGSIG_SEED", "MAGSIG_OUT", "MAGSIG_WORKERS", "MAGSIG_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


def test_parser_knows_every_command():
    parser = build_parser()
    for argv in (
        ["simulate", "--out", "x.csv"],
        ["featurize", "a.csv", "--out", "f.csv"],
        ["train", "f.csv", "--out", "m.npz"],
        ["evaluate", "--model", "m.npz", "--manifest", "t.json", "--out", "r.json"],
        ["experiment", "sir"],
        ["report", "runs/baseline"],
    ):
        assert callable(parser.parse_args(argv).handler)


def test_report_and_compare(tmp_path):
    _write_report(tmp_path / "a")
    _write_report(tmp_path / "b")
    _write_report(tmp_path / "c", accuracy=89.0)

    assert main(["report", str(tmp_path / "a")]) == EXIT_OK
    assert main(["report", str(tmp_path / "a"), "--compare", str(tmp_path / "b")]) == EXIT_OK
    assert main(["report", str(tmp_path / "a"), "--compare", str(tmp_path / "c")]) == EXIT_ERROR
    assert main(["report", str(tmp_path / "missing")]) == EXIT_ERROR


def test_invalid_experiment_override_is_an_error():
    assert main(["experiment", "baseline", "--families", "CNN"]) == EXIT_ERROR


def test_simulated_pass_featurizes(tmp_path):
    rec = tmp_path / "pass.csv"
    argv = ["simulate", "--structure", "5", "--env", "env-4", "--pace", "1.0", "--seed", "3", "--out", str(rec)]
    assert main(argv) == EXIT_OK
    sidecar = json.loads(rec.with_suffix(".json").read_text(encoding="utf-8"))
    assert sidecar["seed"] == 3

    features = tmp_path / "pass.features.csv"
    frames = tmp_path / "pass.frames.jsonl"
    assert main(["featurize", str(rec), "--out", str(features), "--dump-frames", str(frames)]) == EXIT_OK
    assert features.exists()
    assert frames.read_text(encoding="utf-8").count("\n") > 0


@pytest.mark.slow
def test_training_set_featurize_train(tmp_path):
    train_dir = tmp_path / "train"
    assert main(["simulate", "--kind", "train", "--shots", "1", "--seed", "1", "--out", str(train_dir)]) == EXIT_OK
    recordings = sorted(str(p) for p in train_dir.glob("train-s*.csv"))
    assert len(recordings) == 6

    features = tmp_path / "train.features.csv"
    assert main(["featurize", *recordings, "--stride", "8", "--out", str(features)]) == EXIT_OK

    model = tmp_path / "dnn.npz"
    argv = ["train", str(features), "--family", "dnn", "--max-epochs", "2", "--seed", "1", "--out", str(model)]
    assert main(argv) == EXIT_OK
    assert model.exists()


def test_simulated_test_set_verifies(tmp_path):
    out = tmp_path / "test"
    assert main(["simulate", "--kind", "test", "--envs", "env-1", "--passes", "1", "--out", str(out)]) == EXIT_OK
    assert main(["report", "--verify-manifest", str(out / "manifest.json")]) == EXIT_OK
