"""
Recording: columnar magnetometer samples in the device frame plus ground-truth pass events.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from dataclasses_json import DataClassJsonMixin

from ..errors import ConfigurationError, PreconditionError
from .specs import SensorSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PassEvent(DataClassJsonMixin):
    """Ground truth of one pass: which structure and when the walker was next to it."""

    structure_id: int  # 1..6
    closest_approach_time: float  # s
    span: Tuple[float, float]  # s, interval where the structure field is detectable
    pace: float = 0.0  # m/s of the pass

    def __post_init__(self) -> None:
        if not 1 <= self.structure_id <= 6:
            raise ConfigurationError(f"structure_id must be in [1, 6], got {self.structure_id}")
        if self.span[0] > self.span[1]:
            raise ConfigurationError(f"span must be ordered, got {self.span}")

    def overlaps(self, other: "PassEvent") -> bool:
        return self.span[0] < other.span[1] and other.span[0] < self.span[1]


@dataclass
class RecordingComponents:
    """Noiseless decomposition kept by the simulator: b = measure(background + gain * structure)."""

    structure: np.ndarray  # (n, 3) µT, device frame, unit gain
    background: np.ndarray  # (n, 3) µT, device frame, incl. drift and noise
    gain: float
    sensor: SensorSpec


@dataclass
class Recording:
    sample_rate: float  # Hz
    t: np.ndarray  # (n,) s
    b: np.ndarray  # (n, 3) µT, device frame
    pitch: np.ndarray  # (n,) deg
    roll: np.ndarray  # (n,) deg
    pass_events: List[PassEvent] = field(default_factory=list)
    seed: Optional[int] = None
    components: Optional[RecordingComponents] = None
    recipe: Optional[Dict[str, Any]] = None

    def __post_init__(self) -> None:
        self.t = np.asarray(self.t, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.pitch = np.asarray(self.pitch, dtype=float)
        self.roll = np.asarray(self.roll, dtype=float)
        n = len(self.t)
        if self.b.shape != (n, 3) or self.pitch.shape != (n,) or self.roll.shape != (n,):
            raise ConfigurationError("recording columns must share one length; b must be (n, 3)")
        if not self.sample_rate > 0:
            raise ConfigurationError("sample_rate must be positive")

    def __len__(self) -> int:
        return len(self.t)

    @property
    def duration(self) -> float:
        return len(self.t) / self.sample_rate

    @property
    def gain(self) -> float:
        return self.components.gain if self.components is not None else 1.0

    def pass_mask(self, events: Optional[List[PassEvent]] = None) -> np.ndarray:
        """True for samples inside any pass span."""
        mask = np.zeros(len(self.t), dtype=bool)
        for event in self.pass_events if events is None else events:
            mask |= (self.t >= event.span[0]) & (self.t <= event.span[1])
        return mask


def recompose(recording: Recording, gain: float) -> Recording:
    """Rebuild the measured field with the structure component scaled by gain."""
    comps = recording.components
    if comps is None:
        raise PreconditionError("recording has no simulator components; cannot rescale")
    if not gain > 0:
        raise ConfigurationError(f"gain must be positive, got {gain}")
    b = comps.sensor.measure(comps.background + gain * comps.structure)
    return replace(recording, b=b, components=replace(comps, gain=float(gain)))


def rescale_to_sir(recording: Recording, target_db: float, tolerance_db: float = 0.25, max_iter: int = 4) -> Recording:
    """
    Iteratively scale the structure component until measure_sir is within tolerance_db of target_db.
    Gain update: g <- g * 10^((target - measured) / 20).
    """
    from ..sigproc.sir import measure_sir

    measured = measure_sir(recording)
    gain = recording.gain
    for _ in range(max_iter):
        if abs(target_db - measured) <= tolerance_db:
            break
        gain *= 10.0 ** ((target_db - measured) / 20.0)
        recording = recompose(recording, gain)
        measured = measure_sir(recording)
    if abs(target_db - measured) > tolerance_db:
        logger.warning("SIR scaling stopped at %.2f dB (target %.2f dB)", measured, target_db)
    else:
        logger.debug("SIR scaled to %.2f dB with gain %.4f", measured, gain)
    return recording


def scale_pattern_energy(
    recording: Recording, target_db: float, tolerance_db: float = 0.25, max_iter: int = 6
) -> Recording:
    """
    Frame-energy alternative to simulator-level scaling: deviations of pattern samples from the
    background mean are scaled until the measured SIR reaches target_db. Works on any recording.
    """
    from ..sigproc.sir import measure_sir

    mask = recording.pass_mask()
    if not mask.any() or mask.all():
        raise PreconditionError("pattern scaling needs both pattern and background samples")
    base = recording.b
    mean_bg = base[~mask].mean(axis=0)
    gain = 1.0
    scaled = recording
    measured = measure_sir(recording)
    for _ in range(max_iter):
        if abs(target_db - measured) <= tolerance_db:
            break
        gain *= 10.0 ** ((target_db - measured) / 20.0)
        b = base.copy()
        b[mask] = mean_bg + gain * (base[mask] - mean_bg)
        scaled = replace(recording, b=b, components=None)
        measured = measure_sir(scaled)
    return scaled


def decimate(recording: Recording, factor: int) -> Recording:
    """Keep every factor-th sample; pass events keep their absolute times."""
    if not isinstance(factor, (int, np.integer)) or factor < 1:
        raise ConfigurationError(f"decimation factor must be a positive integer, got {factor!r}")
    if factor == 1:
        return recording
    sl = slice(None, None, int(factor))
    comps = recording.components
    if comps is not None:
        comps = replace(
            comps,
            structure=comps.structure[sl],
            background=comps.background[sl],
            sensor=replace(comps.sensor, sample_rate=comps.sensor.sample_rate / factor),
        )
    return replace(
        recording,
        sample_rate=recording.sample_rate / factor,
        t=recording.t[sl],
        b=recording.b[sl],
        pitch=recording.pitch[sl],
        roll=recording.roll[sl],
        components=comps,
    )
