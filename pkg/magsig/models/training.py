"""
Training protocol shared by all six families: stratified 80/20 split, optional standardisation,
mini-batch Adam with patience-based early stopping (gradient families) or a closed-form
LS-SVM fit with temperature calibration (SVM families).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from dataclasses_json import DataClassJsonMixin

from ..errors import DimensionError, TrainingError
from ..features.scaler import FeatureScaler, fit_scaler
from ..features.vectors import FeatureMatrix, FeatureVector
from ..seeding import derive_rng
from .adam import AdamState, adam_step
from .early_stopping import EarlyStopper
from .networks import build_network, cross_entropy
from .pca import PCABasis, pca_fit, pca_transform
from .spec import ModelFamily, ModelSpec, TrainConfig
from .svm import calibrate_temperature, fit_svm, svm_proba, svm_scores

logger = logging.getLogger(__name__)

MODEL_VERSION = 1

Params = Dict[str, np.ndarray]
Dataset = Union[FeatureMatrix, Tuple[np.ndarray, np.ndarray]]


@dataclass
class EpochRecord(DataClassJsonMixin):
    epoch: int
    loss: float
    val_acc: float
    val_loss: float


@dataclass
class TrainedModel:
    spec: ModelSpec
    params: Params
    train_config: TrainConfig
    scaler: Optional[FeatureScaler] = None
    pca: Optional[PCABasis] = None
    temperature: float = 1.0  # SVM score -> probability
    history: List[EpochRecord] = field(default_factory=list)
    version: int = MODEL_VERSION

    @property
    def family(self) -> ModelFamily:
        return self.spec.family

    @property
    def input_dim(self) -> int:
        return int(self.spec.input_dim)

    @property
    def best_val_acc(self) -> Optional[float]:
        return max((h.val_acc for h in self.history), default=None)


def _unpack(dataset: Dataset) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(dataset, FeatureMatrix):
        X, y = dataset.X, dataset.y
    else:
        X, y = dataset
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2 or len(X) == 0:
        raise TrainingError("training set must be a non-empty 2-D matrix")
    if len(y) != len(X):
        raise TrainingError(f"{len(X)} vectors but {len(y)} labels")
    if not np.all(np.isfinite(X)):
        raise TrainingError("training features contain non-finite values")
    if y.min() < 0 or y.max() > 6:
        raise TrainingError("labels must lie in [0, 6]")
    if len(np.unique(y)) < 2:
        raise TrainingError("training needs at least 2 distinct labels")
    return X, y


def stratified_split(y: np.ndarray, val_fraction: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Per-class split; classes too small for a validation share stay in training."""
    train_idx, val_idx = [], []
    for label in np.unique(y):
        idx = rng.permutation(np.flatnonzero(y == label))
        n_val = int(round(len(idx) * val_fraction)) if len(idx) > 1 else 0
        val_idx.append(idx[:n_val])
        train_idx.append(idx[n_val:])
    train = np.sort(np.concatenate(train_idx))
    val = np.sort(np.concatenate(val_idx))
    if len(val) == 0:
        logger.warning("validation split is empty; validating on the training split")
        val = train
    return train, val


class _Pool:
    """Index pool drawn without replacement, reshuffled when exhausted."""

    def __init__(self, indices: np.ndarray, rng: np.random.Generator):
        self.indices = indices
        self.rng = rng
        self.order = rng.permutation(indices)
        self.pos = 0

    def take(self, k: int) -> np.ndarray:
        out = []
        while k > 0:
            if self.pos == len(self.order):
                self.order = self.rng.permutation(self.indices)
                self.pos = 0
            chunk = self.order[self.pos : self.pos + k]
            self.pos += len(chunk)
            k -= len(chunk)
            out.append(chunk)
        return np.concatenate(out)


def stratified_batches(
    y: np.ndarray, batch_size: int, min_nonzero_fraction: float, rng: np.random.Generator
) -> List[np.ndarray]:
    """
    One epoch of mini-batches (positions into y). When both H0 and structure frames are present,
    each batch holds at least min_nonzero_fraction structure frames.
    """
    n = len(y)
    n_batches = max(1, math.ceil(n / batch_size))
    nonzero = np.flatnonzero(y != 0)
    zero = np.flatnonzero(y == 0)
    if len(nonzero) == 0 or len(zero) == 0:
        order = rng.permutation(n)
        return [order[k * batch_size : (k + 1) * batch_size] for k in range(n_batches)]

    size = min(batch_size, n)
    share = max(math.ceil(min_nonzero_fraction * size), int(round(size * len(nonzero) / n)))
    k_nonzero = min(size, share)
    k_zero = size - k_nonzero
    nz_pool, z_pool = _Pool(nonzero, rng), _Pool(zero, rng)
    batches = []
    for _ in range(n_batches):
        parts = [nz_pool.take(k_nonzero)]
        if k_zero:
            parts.append(z_pool.take(k_zero))
        batches.append(rng.permutation(np.concatenate(parts)))
    return batches


def _accuracy(probs: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(np.argmax(probs, axis=1) == y))


def _fit_gradient(
    spec: ModelSpec,
    cfg: TrainConfig,
    X_tr: np.ndarray,
    y_tr: np.ndarray,
    X_val: np.ndarray,
    y_val: np.ndarray,
    rng: np.random.Generator,
) -> Tuple[Params, List[EpochRecord]]:
    net = build_network(spec, X_tr.shape[1])
    params = net.init_params(rng)
    state = AdamState.zeros_like(params)
    adam_cfg = cfg.adam(spec.family)
    stopper = EarlyStopper(cfg.patience)
    history: List[EpochRecord] = []
    t = 0
    for epoch in range(1, cfg.max_epochs + 1):
        for batch in stratified_batches(y_tr, cfg.batch_size, cfg.min_nonzero_fraction, rng):
            _, grads = net.loss_and_grads(params, X_tr[batch], y_tr[batch], spec.weight_decay)
            t += 1
            params, state = adam_step(params, grads, state, t, adam_cfg)

        train_loss = net.loss(params, X_tr, y_tr, spec.weight_decay)
        val_logits = net.logits(params, X_val)
        val_loss = cross_entropy(val_logits, y_val)
        val_acc = float(np.mean(np.argmax(val_logits, axis=1) == y_val))
        if not math.isfinite(train_loss):
            raise TrainingError(f"training loss diverged at epoch {epoch}")
        history.append(EpochRecord(epoch, train_loss, val_acc, val_loss))
        stopper.record_epoch(epoch, val_acc, val_loss, params)
        logger.debug(
            "%s epoch %d: loss=%.4f val_acc=%.4f val_loss=%.4f", spec.family.value, epoch, train_loss, val_acc, val_loss
        )
        if not stopper.should_continue():
            logger.info("%s early stop at epoch %d (best epoch %s)", spec.family.value, epoch, stopper.best_epoch)
            break
    return stopper.best_params, history


def train(dataset: Dataset, spec: ModelSpec, cfg: Optional[TrainConfig] = None) -> TrainedModel:
    cfg = cfg or TrainConfig()
    X, y = _unpack(dataset)
    if spec.input_dim is not None and spec.input_dim != X.shape[1]:
        raise DimensionError(f"spec expects {spec.input_dim} features, data has {X.shape[1]}")
    spec = replace(spec, input_dim=X.shape[1])

    rng = derive_rng(cfg.seed, "train", spec.family.value)
    train_idx, val_idx = stratified_split(y, cfg.val_fraction, rng)

    scaler = fit_scaler(X[train_idx]) if cfg.standardize and len(train_idx) >= 2 else None
    Xs = scaler.transform(X) if scaler is not None else X
    X_tr, y_tr, X_val, y_val = Xs[train_idx], y[train_idx], Xs[val_idx], y[val_idx]
    logger.info(
        "training %s on %d vectors (%d validation, %d classes)",
        spec.family.value,
        len(train_idx),
        len(val_idx),
        len(np.unique(y)),
    )

    if spec.family.is_gradient:
        params, history = _fit_gradient(spec, cfg, X_tr, y_tr, X_val, y_val, rng)
        return TrainedModel(spec=spec, params=params, train_config=cfg, scaler=scaler, history=history)

    pca = None
    if spec.family == ModelFamily.SVM_PCA:
        pca = pca_fit(X_tr, spec.pca_dim)
        X_tr, X_val = pca_transform(pca, X_tr), pca_transform(pca, X_val)
    params = fit_svm(X_tr, y_tr, spec, rng)
    temperature = calibrate_temperature(svm_scores(params, X_val), y_val, cfg.temperature_grid)
    probs_tr = svm_proba(params, X_tr, temperature)
    probs_val = svm_proba(params, X_val, temperature)
    history = [
        EpochRecord(
            1,
            cross_entropy(np.log(np.clip(probs_tr, 1e-300, None)), y_tr),
            _accuracy(probs_val, y_val),
            cross_entropy(np.log(np.clip(probs_val, 1e-300, None)), y_val),
        )
    ]
    return TrainedModel(
        spec=spec,
        params=params,
        train_config=cfg,
        scaler=scaler,
        pca=pca,
        temperature=temperature,
        history=history,
    )


def _as_matrix(x) -> Tuple[np.ndarray, bool]:
    if isinstance(x, FeatureVector):
        return x.values[None, :], True
    if isinstance(x, FeatureMatrix):
        return x.X, False
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        return arr[None, :], True
    return arr, False


def predict_proba(model: TrainedModel, x) -> np.ndarray:
    """Class probabilities over H0..H6; (7,) for one vector, (m, 7) for a matrix."""
    X, single = _as_matrix(x)
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise DimensionError(f"model expects {model.input_dim} features, got {X.shape[-1]}")
    if model.scaler is not None:
        X = model.scaler.transform(X)
    if model.family.is_gradient:
        probs = build_network(model.spec, model.input_dim).probabilities(model.params, X)
    else:
        if model.pca is not None:
            X = pca_transform(model.pca, X)
        probs = svm_proba(model.params, X, model.temperature)
    return probs[0] if single else probs


def predict(model: TrainedModel, x) -> np.ndarray:
    return np.argmax(predict_proba(model, x), axis=-1)
