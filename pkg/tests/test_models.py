"""
Unit tests for the classifiers: optimizer, PCA, gradients, training protocol and model files
"""
import unittest
from dataclasses import replace

import numpy as np
import pytest

from magsig.errors import ConfigurationError, IncompatibleModelError, ModelFormatError, TrainingError
from magsig.models import (
    AdamConfig,
    AdamState,
    EarlyStopper,
    ModelFamily,
    ModelSpec,
    TrainConfig,
    adam_step,
    build_network,
    export_history,
    gradient_check,
    load_model,
    pca_fit,
    pca_inverse,
    pca_transform,
    predict,
    predict_proba,
    save_model,
    softmax,
    stratified_batches,
    stratified_split,
    train,
)
from magsig.seeding import derive_rng

SMALL = {
    "hidden_sizes": (16,),
    "hidden_size": 8,
    "rff_dim": 300,
    "pca_dim": 6,
}


def _blobs(per_class=40, dim=9, seed=0):
    """Seven well separated clusters, one per class, centred on distinct axes."""
    rng = np.random.default_rng(seed)
    y = np.repeat(np.arange(7), per_class)
    centers = 4.0 * np.eye(7, dim)
    X = centers[y] + rng.normal(scale=0.5, size=(len(y), dim))
    return X, y


def _fast_config(**overrides):
    values = {"learning_rate": 0.01, "batch_size": 16, "max_epochs": 40, "seed": 3}
    values.update(overrides)
    return TrainConfig(**values)


class TestAdam(unittest.TestCase):
    def setUp(self) -> None:
        self.cfg = AdamConfig(learning_rate=0.1)

    def test_first_step_bias_correction(self):
        params = {"w": np.array([1.0, -2.0])}
        grads = {"w": np.array([0.3, -0.7])}
        new, state = adam_step(params, grads, AdamState.zeros_like(params), 1, self.cfg)
        np.testing.assert_allclose(state.m["w"] / (1 - self.cfg.beta1), grads["w"])
        np.testing.assert_allclose(new["w"], params["w"] - 0.1 * np.sign(grads["w"]), atol=1e-6)
        # inputs untouched
        np.testing.assert_array_equal(params["w"], [1.0, -2.0])

    def test_minimizes_quadratic(self):
        params = {"w": np.array([1.0])}
        state = AdamState.zeros_like(params)
        for t in range(1, 101):
            params, state = adam_step(params, {"w": 2.0 * params["w"]}, state, t, self.cfg)
        self.assertLess(abs(float(params["w"][0])), 0.5)

    def test_zero_gradient_leaves_params(self):
        params = {"w": np.array([0.25, 4.0])}
        new, _ = adam_step(params, {"w": np.zeros(2)}, AdamState.zeros_like(params), 1, self.cfg)
        np.testing.assert_array_equal(new["w"], params["w"])

    def test_step_counter_starts_at_one(self):
        params = {"w": np.zeros(1)}
        with self.assertRaises(TrainingError):
            adam_step(params, {"w": np.ones(1)}, AdamState.zeros_like(params), 0, self.cfg)


class TestPCA(unittest.TestCase):
    def test_orthonormal_components(self):
        X = np.random.default_rng(0).normal(size=(100, 8)) @ np.diag([5, 4, 3, 2, 1, 1, 0.5, 0.1])
        basis = pca_fit(X, 5)
        np.testing.assert_allclose(basis.components.T @ basis.components, np.eye(5), atol=1e-10)
        self.assertTrue(np.all(np.diff(basis.explained_variance) <= 1e-12))

    def test_full_rank_reconstruction(self):
        X = np.random.default_rng(1).normal(size=(40, 6))
        basis = pca_fit(X, 6)
        np.testing.assert_allclose(pca_inverse(basis, pca_transform(basis, X)), X, atol=1e-10)

    def test_points_on_a_line(self):
        rng = np.random.default_rng(2)
        direction = np.array([1.0, 2.0, -1.0, 0.5])
        X = rng.normal(size=(200, 1)) * direction + rng.normal(scale=1e-3, size=(200, 4))
        basis = pca_fit(X, 2)
        self.assertGreater(basis.explained_variance_ratio[0], 0.999)

    def test_k_out_of_range(self):
        with self.assertRaises(ConfigurationError):
            pca_fit(np.zeros((5, 3)), 4)


class TestGradients(unittest.TestCase):
    def setUp(self) -> None:
        rng = np.random.default_rng(10)
        self.X = rng.normal(size=(8, 9))
        self.y = np.array([0, 1, 2, 3, 4, 5, 6, 2])

    def test_families_match_finite_differences(self):
        for family in ("DNN", "RNN", "GRU", "LSTM"):
            with self.subTest(family=family):
                spec = ModelSpec(family=family, hidden_sizes=(6,), hidden_size=5, weight_decay=0.01)
                error = gradient_check(spec, TrainConfig(seed=1), self.X, self.y, n_params=20)
                self.assertLessEqual(error, 1e-4)

    def test_linear_model_is_exact(self):
        spec = ModelSpec(family="DNN", hidden_sizes=())
        zeros = {"W0": np.zeros((9, 7)), "b0": np.zeros(7)}
        error = gradient_check(spec, None, self.X, self.y, n_params=30, params=zeros)
        self.assertLessEqual(error, 1e-6)

    def test_balanced_labels_cancel_bias_gradient(self):
        spec = ModelSpec(family="DNN", hidden_sizes=())
        net = build_network(spec, 9)
        zeros = {"W0": np.zeros((9, 7)), "b0": np.zeros(7)}
        X = np.random.default_rng(4).normal(size=(14, 9))
        y = np.tile(np.arange(7), 2)
        loss, grads = net.loss_and_grads(zeros, X, y)
        self.assertAlmostEqual(loss, np.log(7.0))
        np.testing.assert_allclose(grads["b0"], 0.0, atol=1e-12)

    def test_softmax_survives_extreme_logits(self):
        probs = softmax(np.array([[1000.0, 0.0, -1000.0], [-800.0, -800.0, -800.0]]))
        self.assertTrue(np.all(np.isfinite(probs)))
        np.testing.assert_allclose(probs.sum(axis=1), 1.0)
        np.testing.assert_allclose(probs[0], [1.0, 0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(probs[1], 1.0 / 3.0)


class TestEarlyStopper(unittest.TestCase):
    def test_stops_after_patience(self):
        stopper = EarlyStopper(patience=5)
        params = {"w": np.array([1.0])}
        stopper.record_epoch(1, 0.5, 1.0, params)
        params["w"][0] = 9.0
        for epoch in range(2, 6):
            stopper.record_epoch(epoch, 0.4, 1.0, params)
            self.assertTrue(stopper.should_continue())
        stopper.record_epoch(6, 0.4, 1.0, params)
        self.assertFalse(stopper.should_continue())
        self.assertEqual(stopper.best_epoch, 1)
        self.assertEqual(float(stopper.best_params["w"][0]), 1.0)

    def test_lower_loss_breaks_ties(self):
        stopper = EarlyStopper(patience=5)
        stopper.record_epoch(1, 0.8, 0.6, {})
        self.assertTrue(stopper.record_epoch(2, 0.8, 0.4, {}))
        self.assertEqual(stopper.best_epoch, 2)
        self.assertEqual(stopper.stalled_epochs, 1)
        self.assertEqual(stopper.get_status()["state"], "STALLED")


class TestTrainingProtocol(unittest.TestCase):
    def test_stratified_split_keeps_class_shares(self):
        y = np.repeat(np.arange(7), 50)
        train_idx, val_idx = stratified_split(y, 0.2, np.random.default_rng(0))
        self.assertEqual(len(np.intersect1d(train_idx, val_idx)), 0)
        self.assertEqual(np.bincount(y[val_idx]).tolist(), [10] * 7)

    def test_batches_carry_structure_share(self):
        y = np.zeros(1000, dtype=int)
        y[:50] = 3
        rng = np.random.default_rng(1)
        for batch in stratified_batches(y, 64, 0.25, rng):
            self.assertGreaterEqual(np.count_nonzero(y[batch]), 16)

    def test_single_label_rejected(self):
        with self.assertRaises(TrainingError):
            train((np.zeros((10, 6)), np.zeros(10, dtype=int)), ModelSpec(family="DNN"))

    def test_family_parsing(self):
        self.assertIs(ModelFamily.parse("lstm"), ModelFamily.LSTM)
        with self.assertRaises(ConfigurationError):
            ModelFamily.parse("transformer")
        with self.assertRaises(ConfigurationError):
            ModelSpec(family="DNN", n_classes=5)


@pytest.mark.parametrize("family", ["SVM", "SVM_PCA", "DNN", "RNN", "GRU", "LSTM"])
def test_every_family_learns_blobs(family):
    X, y = _blobs()
    model = train((X, y), ModelSpec(family=family, **SMALL), _fast_config())
    probs = predict_proba(model, X)
    assert probs.shape == (len(X), 7)
    assert np.all(probs >= 0)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0)
    assert np.mean(predict(model, X) == y) >= 0.9
    assert model.best_val_acc >= 0.9
    assert predict_proba(model, X[0]).shape == (7,)


def test_full_batch_loss_falls_and_best_epoch_is_kept():
    X, y = _blobs()
    cfg = _fast_config(batch_size=len(X), max_epochs=25)
    model = train((X, y), ModelSpec(family="DNN", **SMALL), cfg)
    losses = [h.loss for h in model.history[:3]]
    assert len(losses) == 3
    assert losses[1] <= losses[0] and losses[2] <= losses[1]
    assert model.best_val_acc == max(h.val_acc for h in model.history)

    _, val_idx = stratified_split(y, cfg.val_fraction, derive_rng(cfg.seed, "train", "DNN"))
    assert np.mean(predict(model, X[val_idx]) == y[val_idx]) == pytest.approx(model.best_val_acc)


def test_training_is_deterministic():
    X, y = _blobs(per_class=20)
    spec = ModelSpec(family="GRU", **SMALL)
    a = train((X, y), spec, _fast_config(max_epochs=5))
    b = train((X, y), spec, _fast_config(max_epochs=5))
    for name in a.params:
        np.testing.assert_array_equal(a.params[name], b.params[name])
    assert [h.to_dict() for h in a.history] == [h.to_dict() for h in b.history]


def test_model_file_round_trip(tmp_path):
    X, y = _blobs(per_class=15)
    model = train((X, y), ModelSpec(family="SVM_PCA", **SMALL), _fast_config())
    path = save_model(model, tmp_path / "svm.npz")
    loaded = load_model(path)
    assert loaded.spec.family is ModelFamily.SVM_PCA
    assert loaded.temperature == model.temperature
    np.testing.assert_array_equal(predict_proba(loaded, X), predict_proba(model, X))

    history = export_history(model, tmp_path / "svm.history.csv")
    assert history.read_text(encoding="utf-8").splitlines()[0] == "epoch,loss,val_acc,val_loss"


def test_truncated_model_file(tmp_path):
    X, y = _blobs(per_class=10)
    path = save_model(train((X, y), ModelSpec(family="DNN", **SMALL), _fast_config(max_epochs=2)), tmp_path / "m.npz")
    data = path.read_bytes()
    path.write_bytes(data[: len(data) // 2])
    with pytest.raises(ModelFormatError):
        load_model(path)
    with pytest.raises(ModelFormatError):
        load_model(tmp_path / "missing.npz")


def test_model_version_mismatch(tmp_path):
    X, y = _blobs(per_class=10)
    model = train((X, y), ModelSpec(family="DNN", **SMALL), _fast_config(max_epochs=2))
    path = save_model(replace(model, version=99), tmp_path / "future.npz")
    with pytest.raises(IncompatibleModelError):
        load_model(path)
