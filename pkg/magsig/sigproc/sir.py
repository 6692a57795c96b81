"""
Signal-to-interference ratio of a recording, measured on the field norm.
"""
from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..config import FramingDefaults
from ..errors import UndefinedSIRError
from .components import magnetic_norm

if TYPE_CHECKING:
    from ..fieldsim.recording import PassEvent, Recording

logger = logging.getLogger(__name__)


def sir_frame_length(sample_rate: float) -> int:
    return max(2, int(round(FramingDefaults.SIR_FRAME * sample_rate)))


def measure_sir(recording: "Recording", pass_events: Optional[Sequence["PassEvent"]] = None) -> float:
    """
    10·log10(P_pattern / P_background) in dB over 20 ms frames with 50 % overlap.
    Pattern frames intersect a pass span. Power is the mean squared deviation of the norm from the
    mean norm of the samples outside all spans.
    """
    events = recording.pass_events if pass_events is None else list(pass_events)
    norm = magnetic_norm(recording.b[:, 0], recording.b[:, 1], recording.b[:, 2])
    length = sir_frame_length(recording.sample_rate)
    hop = max(1, length // 2)
    if len(norm) < length:
        raise UndefinedSIRError("recording shorter than one SIR frame")

    outside = ~recording.pass_mask(events)
    if not outside.any():
        raise UndefinedSIRError("no background samples")
    deviation = norm - norm[outside].mean()

    power = sliding_window_view(deviation * deviation, length)[::hop].mean(axis=1)
    starts = np.arange(0, len(norm) - length + 1, hop)
    t_start = recording.t[starts]
    t_end = recording.t[starts + length - 1]
    pattern = np.zeros(len(starts), dtype=bool)
    for event in events:
        pattern |= (t_start <= event.span[1]) & (event.span[0] <= t_end)

    if pattern.all() or not pattern.any():
        raise UndefinedSIRError("SIR needs both pattern and background frames")
    p_pattern = float(power[pattern].mean())
    p_background = float(power[~pattern].mean())
    if p_background == 0.0 or p_pattern == 0.0:
        raise UndefinedSIRError(f"zero frame power (pattern={p_pattern}, background={p_background})")
    return 10.0 * float(np.log10(p_pattern / p_background))
