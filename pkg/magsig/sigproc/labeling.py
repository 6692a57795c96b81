from __future__ import annotations

from dataclasses import replace
from typing import TYPE_CHECKING, Iterable, List, Sequence

import numpy as np

if TYPE_CHECKING:
    from ..fieldsim.recording import PassEvent
    from .framing import ExtendedFrame


def frame_labels(spans: np.ndarray, pass_events: Sequence["PassEvent"]) -> np.ndarray:
    """
    Label per frame span: structure id j when the span intersects pass j (any overlap counts),
    0 otherwise. Several intersecting passes: the one whose closest approach is nearest the frame center.
    """
    spans = np.asarray(spans, dtype=float).reshape(-1, 2)
    labels = np.zeros(len(spans), dtype=int)
    best = np.full(len(spans), np.inf)
    centers = spans.mean(axis=1)
    for event in pass_events:
        hit = (spans[:, 0] <= event.span[1]) & (event.span[0] <= spans[:, 1])
        dist = np.abs(centers - event.closest_approach_time)
        take = hit & (dist < best)
        labels[take] = event.structure_id
        best[take] = dist[take]
    return labels


def label_frames(frames: Iterable["ExtendedFrame"], pass_events: Sequence["PassEvent"]) -> List["ExtendedFrame"]:
    frames = list(frames)
    if not frames:
        return []
    labels = frame_labels(np.array([f.span for f in frames]), pass_events)
    return [replace(f, label=int(label)) for f, label in zip(frames, labels)]
