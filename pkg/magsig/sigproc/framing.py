"""
Rectangular windowing of the six signal components into extended frames.

Frame indices are 1-based: frame i covers [(i-1)·shift, (i-1)·shift + window] seconds from the
start of the recording.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import FramingDefaults
from ..errors import ConfigurationError, PreconditionError
from .components import COMPONENT_NAMES, signal_components
from .labeling import frame_labels

if TYPE_CHECKING:
    from ..fieldsim.recording import PassEvent, Recording

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtendedFrame:
    index: int
    span: Tuple[float, float]  # s
    components: np.ndarray  # (6, N) µT: bx, by, bz, b, bh, bv
    label: int = 0

    def __post_init__(self) -> None:
        if self.components.ndim != 2 or self.components.shape[0] != len(COMPONENT_NAMES):
            raise PreconditionError(f"extended frame needs (6, N) components, got {self.components.shape}")
        if not 0 <= self.label <= 6:
            raise PreconditionError(f"label must be in [0, 6], got {self.label}")

    @property
    def length(self) -> int:
        return self.components.shape[1]

    def component(self, name: str) -> np.ndarray:
        return self.components[COMPONENT_NAMES.index(name)]


def frame_count(duration: float, window: float, shift: float) -> int:
    """floor((D - W) / h) + 1 for D >= W, with a small tolerance for float hop arithmetic."""
    if duration < window - 1e-9:
        return 0
    return int(math.floor((duration - window) / shift + 1e-9)) + 1


class FrameStream(Sequence[ExtendedFrame]):
    """Lazy, indexable frame sequence; every frame is a view into one (6, n) component array."""

    def __init__(
        self,
        components: np.ndarray,
        sample_rate: float,
        window: float = FramingDefaults.WINDOW,
        shift: float = FramingDefaults.SHIFT,
        t0: float = 0.0,
        pass_events: Optional[Sequence["PassEvent"]] = None,
    ):
        if window <= 0 or shift <= 0:
            raise ConfigurationError("window and shift must be positive")
        self.components = components
        self.sample_rate = float(sample_rate)
        self.window = float(window)
        self.shift = float(shift)
        self.t0 = float(t0)
        self.frame_samples = int(round(window * sample_rate))
        if self.frame_samples < 1:
            raise ConfigurationError("window shorter than one sample")

        n = components.shape[1]
        count = frame_count(n / self.sample_rate, self.window, self.shift)
        starts = np.rint(np.arange(count) * self.shift * self.sample_rate).astype(int)
        self._starts = starts[starts + self.frame_samples <= n]
        self._labels = None
        if pass_events is not None:
            self._labels = frame_labels(self.spans(), pass_events)

    def __len__(self) -> int:
        return len(self._starts)

    def _position(self, index: int) -> int:
        pos = index - 1
        if not 0 <= pos < len(self):
            raise IndexError(f"frame index {index} outside 1..{len(self)}")
        return pos

    def frame(self, index: int) -> ExtendedFrame:
        """Frame by its 1-based index."""
        pos = self._position(index)
        start = self._starts[pos]
        view = self.components[:, start : start + self.frame_samples]
        label = int(self._labels[pos]) if self._labels is not None else 0
        return ExtendedFrame(index=index, span=self.span(index), components=view, label=label)

    def __getitem__(self, key: Union[int, slice]):
        if isinstance(key, slice):
            return [self.frame(p + 1) for p in range(*key.indices(len(self)))]
        if key < 0:
            key += len(self)
        return self.frame(key + 1)

    def __iter__(self) -> Iterator[ExtendedFrame]:
        for index in range(1, len(self) + 1):
            yield self.frame(index)

    def span(self, index: int) -> Tuple[float, float]:
        start = self.t0 + (index - 1) * self.shift
        return (start, start + self.window)

    def spans(self) -> np.ndarray:
        starts = self.t0 + np.arange(len(self)) * self.shift
        return np.stack([starts, starts + self.window], axis=1)

    def start_sample(self, index: int) -> int:
        return int(self._starts[self._position(index)])

    def block(self, indices: np.ndarray) -> np.ndarray:
        """(len(indices), 6, N) copy of the frames at the given 1-based indices."""
        indices = np.asarray(indices, dtype=int)
        offsets = self._starts[indices - 1][:, None] + np.arange(self.frame_samples)
        return np.transpose(self.components[:, offsets], (1, 0, 2))

    @property
    def labels(self) -> Optional[np.ndarray]:
        return self._labels


def frame_stream(
    recording: "Recording",
    window: float = FramingDefaults.WINDOW,
    shift: float = FramingDefaults.SHIFT,
    labeled: bool = True,
) -> FrameStream:
    """Frames of a recording; labeled from its pass events unless labeled=False."""
    if recording.duration < window - 1e-9:
        raise PreconditionError(f"recording of {recording.duration:.2f} s is shorter than one {window} s window")
    t0 = float(recording.t[0]) if len(recording.t) else 0.0
    stream = FrameStream(
        signal_components(recording),
        recording.sample_rate,
        window=window,
        shift=shift,
        t0=t0,
        pass_events=recording.pass_events if labeled else None,
    )
    logger.debug("framed %.1f s into %d frames of %d samples", recording.duration, len(stream), stream.frame_samples)
    return stream
