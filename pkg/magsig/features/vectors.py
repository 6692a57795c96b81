"""
Feature vectors: three consecutive frame blocks (i, i-1, i-2) x 6 components x 20 features.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, List, Sequence

import numpy as np

from ..config import FramingDefaults
from ..errors import DimensionError, PreconditionError
from ..sigproc.components import COMPONENT_NAMES
from ..sigproc.framing import ExtendedFrame, frame_stream
from .bank import FEATURE_NAMES, N_FEATURES, feature_bank

if TYPE_CHECKING:
    from ..fieldsim.recording import Recording

logger = logging.getLogger(__name__)

CONTEXT = 3  # frame i and its two predecessors
BLOCK_DIM = len(COMPONENT_NAMES) * N_FEATURES  # 120
VECTOR_DIM = CONTEXT * BLOCK_DIM  # 360
FIRST_VECTOR_INDEX = CONTEXT  # 1-based frame index of the first vector
_CHUNK = 256


def column_names() -> List[str]:
    """f{offset}.{component}.{feature}; offset 0 is frame i, 1 is i-1, 2 is i-2."""
    return [
        f"f{offset}.{component}.{feature}"
        for offset in range(CONTEXT)
        for component in COMPONENT_NAMES
        for feature in FEATURE_NAMES
    ]


def column_schema() -> List[List[str]]:
    return [
        [f"f{offset}", component, feature]
        for offset in range(CONTEXT)
        for component in COMPONENT_NAMES
        for feature in FEATURE_NAMES
    ]


@dataclass
class FeatureVector:
    index: int
    values: np.ndarray
    label: int = 0

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (VECTOR_DIM,):
            raise DimensionError(f"feature vector must have {VECTOR_DIM} values, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DimensionError("feature vector contains non-finite values")

    def block(self, offset: int) -> np.ndarray:
        return self.values[offset * BLOCK_DIM : (offset + 1) * BLOCK_DIM]


def frame_block(frame: ExtendedFrame) -> np.ndarray:
    """120 features of one extended frame, component-major."""
    return feature_bank(frame.components).reshape(-1)


def build_feature_vector(frames: Sequence[ExtendedFrame]) -> FeatureVector:
    """frames = (frame i, frame i-1, frame i-2) of one recording."""
    if len(frames) != CONTEXT:
        raise PreconditionError(f"need exactly {CONTEXT} frames, got {len(frames)}")
    index = frames[0].index
    if index <= 2:
        raise PreconditionError(f"feature vectors start at frame 3, got i = {index}")
    if [f.index for f in frames] != [index - k for k in range(CONTEXT)]:
        raise PreconditionError(f"frames must be consecutive (i, i-1, i-2), got {[f.index for f in frames]}")
    values = np.concatenate([frame_block(f) for f in frames])
    return FeatureVector(index=index, values=values, label=frames[0].label)


def recurrent_view(X: np.ndarray, steps: int = CONTEXT) -> np.ndarray:
    """(m, 360) -> (m, 3, 120) time-major sequence, oldest frame first."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[-1] % steps:
        raise DimensionError(f"{X.shape[-1]} features do not split into {steps} blocks")
    return X.reshape(len(X), steps, X.shape[-1] // steps)[:, ::-1, :]


@dataclass
class FeatureMatrix:
    X: np.ndarray  # (m, 360)
    y: np.ndarray  # (m,)
    indices: np.ndarray  # 1-based frame index i of each row
    spans: np.ndarray  # (m, 2) span of frame i
    recording_id: str = ""
    columns: List[str] = field(default_factory=column_names)

    def __len__(self) -> int:
        return len(self.y)

    @classmethod
    def empty(cls, recording_id: str = "") -> "FeatureMatrix":
        return cls(
            X=np.zeros((0, VECTOR_DIM)),
            y=np.zeros(0, dtype=int),
            indices=np.zeros(0, dtype=int),
            spans=np.zeros((0, 2)),
            recording_id=recording_id,
        )

    def vectors(self) -> List[FeatureVector]:
        return [FeatureVector(int(i), x, int(label)) for i, x, label in zip(self.indices, self.X, self.y)]


def concat_matrices(matrices: Sequence[FeatureMatrix]) -> FeatureMatrix:
    matrices = [m for m in matrices if len(m)]
    if not matrices:
        return FeatureMatrix.empty()
    return FeatureMatrix(
        X=np.concatenate([m.X for m in matrices]),
        y=np.concatenate([m.y for m in matrices]),
        indices=np.concatenate([m.indices for m in matrices]),
        spans=np.concatenate([m.spans for m in matrices]),
        recording_id=",".join(m.recording_id for m in matrices),
    )


def featurize_recording(
    recording: "Recording",
    window: float = FramingDefaults.WINDOW,
    shift: float = FramingDefaults.SHIFT,
    vector_stride: int = 1,
    recording_id: str = "",
) -> FeatureMatrix:
    """
    Vectors for frames i = 3, 3 + stride, ... of one recording.
    Only the frames those vectors reference are featurized.
    """
    if vector_stride < 1:
        raise PreconditionError("vector_stride must be >= 1")
    stream = frame_stream(recording, window=window, shift=shift)
    targets = np.arange(FIRST_VECTOR_INDEX, len(stream) + 1, vector_stride)
    if targets.size == 0:
        logger.warning("recording %s has %d frames; no feature vectors", recording_id or "?", len(stream))
        return FeatureMatrix.empty(recording_id)

    needed = np.unique(np.concatenate([targets - k for k in range(CONTEXT)]))
    row_of = np.full(len(stream) + 1, -1)
    row_of[needed] = np.arange(len(needed))
    blocks = np.empty((len(needed), BLOCK_DIM))
    for lo in range(0, len(needed), _CHUNK):
        chunk = needed[lo : lo + _CHUNK]
        frames = stream.block(chunk)  # (c, 6, N)
        feats = feature_bank(frames.reshape(-1, frames.shape[-1]))
        blocks[lo : lo + len(chunk)] = feats.reshape(len(chunk), BLOCK_DIM)

    X = np.concatenate([blocks[row_of[targets - k]] for k in range(CONTEXT)], axis=1)
    labels = stream.labels if stream.labels is not None else np.zeros(len(stream), dtype=int)
    logger.debug("featurized %s: %d vectors from %d frames", recording_id or "recording", len(targets), len(needed))
    return FeatureMatrix(
        X=X,
        y=labels[targets - 1].astype(int),
        indices=targets,
        spans=stream.spans()[targets - 1],
        recording_id=recording_id,
    )
