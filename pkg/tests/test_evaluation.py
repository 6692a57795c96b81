"""
Unit tests for ROC measures, pass detection, localization error and evaluation reports
"""
import unittest

import numpy as np
import pytest

from magsig.errors import EvaluationError
from magsig.evaluation import (
    ConditionMeta,
    DetectionEvent,
    build_eval_report,
    class_rocs,
    confusion_matrix,
    detect_passes,
    detection_accuracy,
    load_eval_report,
    localization_accuracy,
    macro_auc,
    mean_localization_error,
    merge_mle,
    roc_curve,
    write_eval_report,
    write_roc_csvs,
)
from magsig.fieldsim import PassEvent


def _one_hot(labels, n=7):
    out = np.zeros((len(labels), n))
    out[np.arange(len(labels)), labels] = 1.0
    return out


def _spans(n, shift=0.08, window=12.5):
    starts = np.arange(n) * shift
    return np.stack([starts, starts + window], axis=1)


class TestRoc(unittest.TestCase):
    def setUp(self) -> None:
        self.labels = np.repeat(np.arange(7), 30)

    def test_perfect_scores(self):
        probs = _one_hot(self.labels)
        self.assertAlmostEqual(macro_auc(probs, self.labels), 1.0)
        self.assertAlmostEqual(localization_accuracy(probs, self.labels), 100.0)
        self.assertAlmostEqual(detection_accuracy(probs, self.labels), 100.0)

    def test_inverted_scores(self):
        probs = 1.0 - _one_hot(self.labels)
        self.assertAlmostEqual(macro_auc(probs, self.labels), 0.0)

    def test_uninformative_scores(self):
        probs = np.full((len(self.labels), 7), 1.0 / 7)
        self.assertAlmostEqual(macro_auc(probs, self.labels), 0.5)
        self.assertAlmostEqual(localization_accuracy(probs, self.labels), 50.0)

    def test_random_scores(self):
        rng = np.random.default_rng(0)
        labels = rng.integers(0, 7, size=20000)
        probs = rng.dirichlet(np.ones(7), size=len(labels))
        self.assertAlmostEqual(macro_auc(probs, labels), 0.5, delta=0.02)

    def test_monotone_score_transforms_change_nothing(self):
        rng = np.random.default_rng(4)
        labels = rng.integers(0, 7, size=700)
        probs = rng.dirichlet(np.ones(7), size=len(labels)) + 0.3 * _one_hot(labels)
        probs /= probs.sum(axis=1, keepdims=True)
        base = class_rocs(probs, labels)
        for transformed in (probs**3, np.log(probs / (1.0 - probs)), np.exp(probs)):
            curves = class_rocs(transformed, labels)
            for before, after in zip(base, curves):
                self.assertEqual(before.fpr, after.fpr)
                self.assertEqual(before.tpr, after.tpr)
                self.assertAlmostEqual(before.auc, after.auc, delta=1e-12)
            self.assertAlmostEqual(macro_auc(transformed, labels), macro_auc(probs, labels), delta=1e-12)
            self.assertAlmostEqual(
                localization_accuracy(transformed, labels), localization_accuracy(probs, labels), delta=1e-12
            )

    def test_curve_shape(self):
        curve = roc_curve(np.array([0.1, 0.4, 0.35, 0.8]), np.array([0, 0, 1, 1]), 1)
        self.assertEqual(curve.fpr[0], 0.0)
        self.assertEqual(curve.tpr[-1], 1.0)
        self.assertAlmostEqual(curve.auc, 0.75)
        self.assertTrue(all(np.isfinite(curve.thresholds)))

    def test_missing_class_is_skipped(self):
        labels = np.array([0, 0, 2, 2, 5, 5])
        curves = class_rocs(_one_hot(labels), labels)
        self.assertEqual([c.label for c in curves], ["0", "2", "5"])

    def test_single_class_rejected(self):
        labels = np.zeros(10, dtype=int)
        with self.assertRaises(EvaluationError):
            class_rocs(_one_hot(labels), labels)


def test_confusion_diagonal():
    labels = np.array([0, 1, 1, 4, 6, 6, 6])
    matrix = confusion_matrix(labels, labels)
    assert matrix.shape == (7, 7)
    assert np.trace(matrix) == len(labels)
    assert matrix[6, 6] == 3
    assert matrix.sum() - np.trace(matrix) == 0


def test_detect_passes_needs_three_frames():
    predictions = np.array([0, 0, 3, 3, 3, 0, 5, 5, 0, 2, 2, 2, 2])
    spans = _spans(len(predictions))
    events = detect_passes(predictions, spans)
    assert [e.structure_id for e in events] == [3, 2]
    assert (events[0].first_row, events[0].last_row) == (2, 4)
    assert events[0].time == pytest.approx(spans[3].mean())
    assert events[1].time == pytest.approx(spans[10].mean())
    assert detect_passes(np.zeros(0, dtype=int), np.zeros((0, 2))) == []


def test_localization_error_closed_forms():
    truth = [
        PassEvent(structure_id=1, closest_approach_time=20.0, span=(17.0, 23.0), pace=1.2),
        PassEvent(structure_id=4, closest_approach_time=60.0, span=(57.0, 63.0), pace=1.0),
    ]
    exact = mean_localization_error([DetectionEvent(1, 20.0, 0, 5)], truth)
    assert exact.mle_m == 0.0
    assert exact.matched == 1
    assert exact.missed == 1

    late = mean_localization_error([DetectionEvent(4, 61.0, 0, 5)], truth)
    assert late.mle_m == pytest.approx(1.0)
    assert mean_localization_error([DetectionEvent(4, 61.0, 0, 5)], truth, pace=2.0).mle_m == pytest.approx(2.0)


def test_wrong_structure_is_a_false_alarm():
    truth = [PassEvent(structure_id=2, closest_approach_time=30.0, span=(28.0, 32.0), pace=1.2)]
    result = mean_localization_error([DetectionEvent(5, 30.0, 0, 3)], truth)
    assert result.mle_m is None
    assert (result.matched, result.missed, result.false_alarms) == (0, 1, 1)


def test_one_detection_per_pass():
    truth = [PassEvent(structure_id=3, closest_approach_time=40.0, span=(38.0, 42.0), pace=1.0)]
    events = [DetectionEvent(3, 40.5, 0, 3), DetectionEvent(3, 42.0, 10, 13)]
    result = mean_localization_error(events, truth)
    assert result.errors_m == [pytest.approx(0.5)]
    assert result.false_alarms == 1
    merged = merge_mle([result, mean_localization_error([DetectionEvent(3, 41.5, 0, 3)], truth)])
    assert merged.mle_m == pytest.approx(1.0)
    assert merged.max_error_m == pytest.approx(1.5)
    assert merged.matched == 2


def test_eval_report_files(tmp_path):
    n = 60
    labels = np.zeros(n, dtype=int)
    labels[20:30] = 2
    labels[40:50] = 5
    spans = _spans(n)
    truth = {
        "rec-a": [
            PassEvent(structure_id=2, closest_approach_time=float(spans[24].mean()), span=(8.0, 15.0), pace=1.0),
            PassEvent(structure_id=5, closest_approach_time=float(spans[44].mean()), span=(9.6, 16.5), pace=1.0),
        ]
    }
    report = build_eval_report(
        _one_hot(labels), labels, spans, ["rec-a"] * n, truth, ConditionMeta(name="baseline", seed=0), "LSTM"
    )
    assert report.frame_accuracy == pytest.approx(100.0)
    assert report.macro_auc == pytest.approx(1.0)
    assert report.mle.matched == 2
    assert report.mle_m == pytest.approx(0.0)

    path = write_eval_report(report, tmp_path / "baseline_LSTM.json")
    assert load_eval_report(path) == report
    written = write_roc_csvs(report, tmp_path, prefix="baseline_LSTM_")
    assert sorted(p.name for p in written) == [
        "baseline_LSTM_roc_class0.csv",
        "baseline_LSTM_roc_class2.csv",
        "baseline_LSTM_roc_class5.csv",
        "baseline_LSTM_roc_detection.csv",
    ]
