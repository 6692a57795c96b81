"""
Feature matrix files: CSV (360 feature columns + label) with a `<name>.schema.json` sidecar.
"""
import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from ..errors import DimensionError
from .vectors import VECTOR_DIM, FeatureMatrix, column_names, column_schema

logger = logging.getLogger(__name__)


def schema_path(csv_path: Union[str, Path]) -> Path:
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.stem + ".schema.json")


def write_feature_matrix(matrix: FeatureMatrix, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(matrix.X, columns=column_names())
    frame["label"] = matrix.y.astype(int)
    frame.insert(0, "frame", matrix.indices.astype(int))
    frame.to_csv(path, index=False, float_format="%.9g")
    schema = {
        "recording_id": matrix.recording_id,
        "columns": column_schema(),
        "label": "label",
        "index": "frame",
    }
    schema_path(path).write_text(json.dumps(schema, indent=2) + "\n", encoding="utf-8")
    logger.info("feature matrix written: %s (%d x %d)", path, len(matrix), VECTOR_DIM)
    return path


def read_feature_matrix(path: Union[str, Path], shift: float = 0.08, window: float = 12.5) -> FeatureMatrix:
    path = Path(path)
    frame = pd.read_csv(path)
    names = column_names()
    missing = [c for c in names if c not in frame.columns]
    if missing:
        raise DimensionError(f"{path}: {len(missing)} feature columns missing (first: {missing[0]})")
    indices = frame["frame"].to_numpy(dtype=int) if "frame" in frame.columns else np.arange(len(frame)) + 3
    starts = (indices - 1) * shift
    recording_id = ""
    sidecar = schema_path(path)
    if sidecar.exists():
        recording_id = json.loads(sidecar.read_text(encoding="utf-8")).get("recording_id", "")
    return FeatureMatrix(
        X=frame[names].to_numpy(dtype=float),
        y=frame["label"].to_numpy(dtype=int),
        indices=indices,
        spans=np.stack([starts, starts + window], axis=1),
        recording_id=recording_id,
    )
