"""
Dataset generation, manifests and a small end-to-end experiment
"""
import pytest

from magsig.config import ExperimentConfig
from magsig.errors import ConfigurationError, EvaluationError, PreconditionError
from magsig.harness import (
    DatasetManifest,
    build_test_set,
    build_training_set,
    evaluate_model,
    load_dataset,
    load_experiment_report,
    load_manifest,
    reports_equal_ignoring_timestamps,
    run_baseline,
    run_decimation,
    run_fewshot,
    run_pace_sweep,
    run_sir_sweep,
    train_family,
    verify_manifest,
    write_manifest,
)
from magsig.harness.runlog import RUN_LOG_NAME, read_run_events


def test_training_set_is_shielded_and_prefix_stable():
    one = build_training_set(shots_per_structure=1, seed=7, featurize=False)
    two = build_training_set(shots_per_structure=2, seed=7, featurize=False)
    assert [e.recording_id for e in one.manifest.recordings] == [f"train-s{k}" for k in range(1, 7)]
    assert one.manifest.n_passes == 6
    assert two.manifest.n_passes == 12
    for entry in one.manifest.recordings:
        assert entry.environment == "shielded"
        first = one.recordings[entry.recording_id].pass_events[0]
        assert first == two.recordings[entry.recording_id].pass_events[0]
        assert first.structure_id == int(entry.recording_id[-1])


def test_test_set_shuffles_all_structures():
    dataset = build_test_set(passes_per_structure=1, envs=["env-2"], seed=3, pace=1.6, featurize=False)
    recording = dataset.recordings["test-env-2"]
    assert sorted(e.structure_id for e in recording.pass_events) == [1, 2, 3, 4, 5, 6]
    assert all(e.pace == 1.6 for e in recording.pass_events)
    entry = dataset.manifest.recordings[0]
    assert entry.role == "test-env-2"
    assert entry.target_sir_db == 8.0
    assert entry.measured_sir_db is not None


def test_dataset_arguments_validated():
    with pytest.raises(PreconditionError):
        build_training_set(shots_per_structure=0)
    with pytest.raises(ConfigurationError):
        build_test_set(passes_per_structure=1, envs=["shielded"])
    with pytest.raises(ConfigurationError):
        DatasetManifest(kind="validation", seed=0, recordings=[])


def test_manifest_regenerates_bit_exactly(tmp_path):
    dataset = build_test_set(passes_per_structure=1, envs=["env-1"], seed=2, out_dir=tmp_path, featurize=False)
    path = write_manifest(dataset.manifest, tmp_path / "manifest.json")
    manifest = load_manifest(path)
    assert manifest.n_passes == 6
    assert [e.seed for e in manifest.recordings] == [e.seed for e in dataset.manifest.recordings]
    assert verify_manifest(manifest, tmp_path) == []

    loaded = load_dataset(manifest, tmp_path)
    assert loaded.recordings["test-env-1"].pass_events == dataset.recordings["test-env-1"].pass_events

    csv_path = tmp_path / "test-env-1.csv"
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    cells = lines[10].split(",")
    cells[1] = cells[1] + "1" if "e" not in cells[1] else "0.5"
    lines[10] = ",".join(cells)
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    problems = verify_manifest(manifest, tmp_path)
    assert len(problems) == 1 and "differ" in problems[0]

    csv_path.unlink()
    assert "missing" in verify_manifest(manifest, tmp_path)[0]


def test_unfeaturized_dataset_cannot_be_evaluated():
    train_set = build_training_set(shots_per_structure=1, seed=0, vector_stride=8)
    model = train_family(train_set, "SVM", seed=0, overrides={"rff_dim": 100})
    test_set = build_test_set(passes_per_structure=1, envs=["env-3"], seed=0, featurize=False)
    with pytest.raises(EvaluationError):
        evaluate_model(model, test_set)


@pytest.mark.slow
def test_small_baseline_is_reproducible(tmp_path):
    cfg = ExperimentConfig(
        seeds=[0],
        families=["DNN", "SVM"],
        train_shots=1,
        test_passes=1,
        environments=["env-1"],
        train_vector_stride=8,
        test_vector_stride=8,
        max_epochs=3,
        model_overrides={"DNN": {"hidden_sizes": [32]}, "SVM": {"rff_dim": 200}},
        output_dir=str(tmp_path),
        workers=1,
    )
    first = run_baseline(cfg)
    assert first.failures == []
    assert [(r.condition.name, r.family) for r in first.runs] == [("baseline", "DNN"), ("baseline", "SVM")]
    assert first.summary("baseline", "DNN").reference_accuracy == 83.0
    out_dir = tmp_path / "baseline"
    assert (out_dir / "seed0" / "baseline_DNN.json").exists()
    assert (out_dir / "seed0" / "models" / "baseline_SVM.npz").exists()
    assert (out_dir / "seed0" / "test_manifest.json").exists()
    assert len(read_run_events(out_dir / RUN_LOG_NAME)) == 2

    stored = load_experiment_report(out_dir)
    second = run_baseline(cfg)
    assert reports_equal_ignoring_timestamps(stored, second)


@pytest.mark.slow
def test_small_sweeps_produce_every_condition(tmp_path):
    cfg = ExperimentConfig(
        seeds=[1],
        families=["DNN"],
        sweep_families=["DNN"],
        train_shots=1,
        test_passes=1,
        environments=["env-2"],
        train_vector_stride=8,
        test_vector_stride=8,
        max_epochs=2,
        model_overrides={"DNN": {"hidden_sizes": [16]}},
        output_dir=str(tmp_path),
        workers=1,
    )

    sir = run_sir_sweep(cfg, [8.0, 4.0])
    assert sir.failures == []
    assert [r.condition.name for r in sir.runs] == ["sir8dB", "sir4dB"]
    assert sir.runs[0].condition.measured_sir_db > sir.runs[1].condition.measured_sir_db

    rates = run_decimation(cfg, [120.0, 60.0])
    assert rates.failures == []
    assert [r.condition.name for r in rates.runs] == ["baseline", "rate120Hz", "rate60Hz"]
    assert rates.runs[2].condition.sample_rate == 60.0
    assert not any("differs from baseline" in f for f in rates.acceptance_failures)

    fewshot = run_fewshot(cfg, [1, 2])
    assert [r.condition.shots for r in fewshot.runs] == [1, 2]

    pace = run_pace_sweep(cfg, [0.8, 2.0])
    assert [r.condition.pace for r in pace.runs] == pytest.approx([0.8, 2.0])
    assert (tmp_path / "pace_sweep" / "summary.csv").exists()
