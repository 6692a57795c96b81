"""
Unit tests for the feature bank, feature vectors and the scaler
"""
import unittest

import numpy as np
import pytest

from magsig.errors import DimensionError, DomainError, PreconditionError
from magsig.features import (
    BLOCK_DIM,
    FEATURE_NAMES,
    VECTOR_DIM,
    FeatureVector,
    build_feature_vector,
    column_names,
    extract_component_features,
    feature_bank,
    featurize_recording,
    fit_scaler,
    read_feature_matrix,
    recurrent_view,
    write_feature_matrix,
)
from magsig.fieldsim import PassEvent, Recording
from magsig.sigproc import ExtendedFrame

FS = 120.0


def _feature(values, name):
    return values[FEATURE_NAMES.index(name)]


def _noise_recording(seconds=13.0, seed=0, events=()):
    rng = np.random.default_rng(seed)
    n = int(seconds * FS)
    return Recording(
        sample_rate=FS,
        t=np.arange(n) / FS,
        b=rng.normal(size=(n, 3)) + np.array([20.0, 5.0, 40.0]),
        pitch=rng.normal(size=n),
        roll=rng.normal(size=n),
        pass_events=list(events),
    )


class TestFeatureBank(unittest.TestCase):
    def test_twenty_features(self):
        self.assertEqual(len(FEATURE_NAMES), 20)
        out = feature_bank(np.random.default_rng(0).normal(size=(4, 64)))
        self.assertEqual(out.shape, (4, 20))

    def test_constant_series(self):
        values = extract_component_features(np.full(1500, 2.0))
        self.assertEqual(_feature(values, "mean"), 2.0)
        self.assertEqual(_feature(values, "median"), 2.0)
        self.assertEqual(_feature(values, "rms"), 2.0)
        self.assertEqual(_feature(values, "energy"), 4.0)
        for name in ("std", "range", "skewness", "kurtosis", "mean_abs_dev", "mean_crossings", "peak_count"):
            self.assertEqual(_feature(values, name), 0.0, name)
        for name in ("mean_abs_diff", "max_abs_diff", "autocorr_lag1"):
            self.assertEqual(_feature(values, name), 0.0, name)
        np.testing.assert_array_equal(values[-4:], 0.0)

    def test_alternating_series(self):
        series = np.tile([1.0, -1.0], 8)
        values = extract_component_features(series)
        self.assertAlmostEqual(_feature(values, "mean"), 0.0)
        self.assertAlmostEqual(_feature(values, "std"), 1.0)
        self.assertAlmostEqual(_feature(values, "kurtosis"), 1.0)
        self.assertEqual(_feature(values, "mean_crossings"), 15.0)
        self.assertEqual(_feature(values, "peak_count"), 7.0)
        self.assertAlmostEqual(_feature(values, "mean_abs_diff"), 2.0)
        self.assertAlmostEqual(_feature(values, "autocorr_lag1"), -15.0 / 16.0)
        # All power sits at the Nyquist bin
        np.testing.assert_allclose(values[-4:], [0.0, 0.0, 0.0, 1.0], atol=1e-12)

    def test_band_energies_sum_to_one(self):
        out = feature_bank(np.random.default_rng(5).normal(size=(10, 200)))
        np.testing.assert_allclose(out[:, -4:].sum(axis=1), 1.0)

    def test_short_series_rejected(self):
        with self.assertRaises(PreconditionError):
            extract_component_features(np.zeros(15))

    def test_non_finite_rejected(self):
        series = np.zeros(32)
        series[4] = np.nan
        with self.assertRaises(DomainError):
            extract_component_features(series)


class TestFeatureVectors(unittest.TestCase):
    def _frame(self, index, components, label=0):
        span = ((index - 1) * 0.08, (index - 1) * 0.08 + 12.5)
        return ExtendedFrame(index=index, span=span, components=components, label=label)

    def test_dimension_and_columns(self):
        self.assertEqual(VECTOR_DIM, 360)
        self.assertEqual(BLOCK_DIM, 120)
        names = column_names()
        self.assertEqual(len(names), 360)
        self.assertEqual(len(set(names)), 360)

    def test_identical_frames_give_identical_blocks(self):
        comps = np.random.default_rng(1).normal(size=(6, 100))
        vector = build_feature_vector([self._frame(k, comps) for k in (5, 4, 3)])
        self.assertEqual(vector.values.shape, (360,))
        np.testing.assert_array_equal(vector.block(0), vector.block(1))
        np.testing.assert_array_equal(vector.block(1), vector.block(2))

    def test_first_vector_at_frame_three(self):
        comps = np.zeros((6, 100))
        with self.assertRaises(PreconditionError):
            build_feature_vector([self._frame(k, comps) for k in (2, 1, 0)])
        with self.assertRaises(PreconditionError):
            build_feature_vector([self._frame(k, comps) for k in (6, 4, 3)])

    def test_label_from_newest_frame(self):
        comps = np.ones((6, 100))
        frames = [self._frame(7, comps, label=3), self._frame(6, comps), self._frame(5, comps)]
        self.assertEqual(build_feature_vector(frames).label, 3)

    def test_vector_rejects_bad_width(self):
        with self.assertRaises(DimensionError):
            FeatureVector(index=3, values=np.zeros(359))


def test_featurize_recording_blocks_shift():
    matrix = featurize_recording(_noise_recording(), recording_id="noise")
    # 13 s gives 7 frames, so vectors for i = 3..7
    assert matrix.indices.tolist() == [3, 4, 5, 6, 7]
    assert matrix.X.shape == (5, 360)
    for row in range(len(matrix) - 1):
        np.testing.assert_array_equal(matrix.X[row + 1, BLOCK_DIM : 2 * BLOCK_DIM], matrix.X[row, :BLOCK_DIM])
    sequence = recurrent_view(matrix.X)
    assert sequence.shape == (5, 3, 120)
    np.testing.assert_array_equal(sequence[:, -1, :], matrix.X[:, :BLOCK_DIM])


def test_featurize_stride_and_labels():
    event = PassEvent(structure_id=2, closest_approach_time=12.8, span=(12.7, 13.0))
    matrix = featurize_recording(_noise_recording(events=[event]), vector_stride=2)
    assert matrix.indices.tolist() == [3, 5, 7]
    assert set(matrix.y.tolist()) == {0, 2}


def test_feature_matrix_file_round_trip(tmp_path):
    matrix = featurize_recording(_noise_recording(seed=3), recording_id="rec-3")
    path = write_feature_matrix(matrix, tmp_path / "rec.csv")
    loaded = read_feature_matrix(path)
    assert loaded.recording_id == "rec-3"
    np.testing.assert_array_equal(loaded.indices, matrix.indices)
    np.testing.assert_allclose(loaded.X, matrix.X, rtol=1e-8, atol=1e-12)
    np.testing.assert_allclose(loaded.spans, matrix.spans)


def test_scaler_zscores_and_centres_flat_columns():
    rng = np.random.default_rng(4)
    X = rng.normal(loc=3.0, scale=2.0, size=(50, 4))
    X[:, 2] = 7.0
    scaler = fit_scaler(X)
    Z = scaler.transform(X)
    np.testing.assert_allclose(Z.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(Z[:, [0, 1, 3]].std(axis=0), 1.0)
    np.testing.assert_array_equal(Z[:, 2], 0.0)
    with pytest.raises(DimensionError):
        scaler.transform(np.zeros((2, 5)))
    with pytest.raises(PreconditionError):
        fit_scaler(X[:1])
