"""
Model files: a numpy .npz container (no pickles) with one JSON metadata entry and flat arrays.
"""
from __future__ import annotations

import json
import logging
import zipfile
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from ..errors import IncompatibleModelError, ModelFormatError
from ..features.scaler import FeatureScaler
from .pca import PCABasis
from .spec import ModelSpec, TrainConfig
from .training import MODEL_VERSION, EpochRecord, TrainedModel

logger = logging.getLogger(__name__)

FORMAT_TAG = "magsig-model"


def save_model(model: TrainedModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = {
        "format": FORMAT_TAG,
        "version": model.version,
        "spec": model.spec.to_dict(encode_json=True),
        "train_config": model.train_config.to_dict(encode_json=True),
        "temperature": model.temperature,
        "history": [h.to_dict() for h in model.history],
        "params": sorted(model.params),
        "has_scaler": model.scaler is not None,
        "has_pca": model.pca is not None,
    }
    arrays = {f"param.{name}": value for name, value in model.params.items()}
    if model.scaler is not None:
        arrays["scaler.mean"] = model.scaler.mean
        arrays["scaler.std"] = model.scaler.std
    if model.pca is not None:
        arrays["pca.mean"] = model.pca.mean
        arrays["pca.components"] = model.pca.components
        arrays["pca.explained_variance"] = model.pca.explained_variance
        meta["pca_total_variance"] = model.pca.total_variance
    arrays["meta"] = np.array(json.dumps(meta, sort_keys=True))
    with path.open("wb") as f:
        np.savez(f, **arrays)
    logger.info("model saved: %s (%s, %d arrays)", path, model.spec.family.value, len(arrays))
    return path


def load_model(path: Union[str, Path]) -> TrainedModel:
    path = Path(path)
    if not path.exists():
        raise ModelFormatError(f"Model file not found: {path}")
    try:
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            arrays = {key: np.array(data[key]) for key in data.files if key != "meta"}
    except (OSError, ValueError, KeyError, EOFError, zipfile.BadZipFile, json.JSONDecodeError) as e:
        raise ModelFormatError(f"Cannot read model file {path}: {e}") from e

    if meta.get("format") != FORMAT_TAG:
        raise ModelFormatError(f"{path} is not a {FORMAT_TAG} file")
    if meta.get("version") != MODEL_VERSION:
        raise IncompatibleModelError(f"{path}: format version {meta.get('version')}, expected {MODEL_VERSION}")

    try:
        params = {name: arrays[f"param.{name}"] for name in meta["params"]}
        scaler = FeatureScaler(arrays["scaler.mean"], arrays["scaler.std"]) if meta["has_scaler"] else None
        pca = None
        if meta["has_pca"]:
            pca = PCABasis(
                mean=arrays["pca.mean"],
                components=arrays["pca.components"],
                explained_variance=arrays["pca.explained_variance"],
                total_variance=float(meta.get("pca_total_variance", 0.0)),
            )
        return TrainedModel(
            spec=ModelSpec.from_dict(meta["spec"]),
            params=params,
            train_config=TrainConfig.from_dict(meta["train_config"]),
            scaler=scaler,
            pca=pca,
            temperature=float(meta["temperature"]),
            history=[EpochRecord.from_dict(h) for h in meta["history"]],
            version=int(meta["version"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"{path}: incomplete model file ({e})") from e


def export_history(model: TrainedModel, path: Union[str, Path]) -> Path:
    """epoch,loss,val_acc,val_loss"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([h.to_dict() for h in model.history], columns=["epoch", "loss", "val_acc", "val_loss"])
    frame.to_csv(path, index=False)
    return path
