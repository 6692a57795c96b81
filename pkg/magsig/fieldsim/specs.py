"""
Contracts of the simulator: walk geometry, clutter environment and sensor model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from dataclasses_json import DataClassJsonMixin

from ..config import SimulationDefaults
from ..errors import ConfigurationError
from .dipole import DipoleSource, Vec3


@dataclass
class WalkSpec(DataClassJsonMixin):
    """One straight walk parallel to the row of magnets."""

    pace: float  # m/s
    lateral_distance: float  # m
    duration: float  # s
    sensor_height: float = SimulationDefaults.SENSOR_HEIGHT
    magnet_height: float = SimulationDefaults.MAGNET_HEIGHT
    heading_azimuth: float = 0.0  # deg, device yaw
    pitch: float = 0.0  # deg
    roll: float = 0.0  # deg
    start_offset: float = 6.0  # m before the first unit
    end_offset: float = 6.0  # m past the last unit
    sway_deg: float = 0.0  # gait oscillation of pitch/roll

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if not self.pace > 0:
            raise ConfigurationError(f"pace must be positive, got {self.pace}")
        if not self.lateral_distance > 0:
            raise ConfigurationError(f"lateral_distance must be positive, got {self.lateral_distance}")
        if not self.duration > 0:
            raise ConfigurationError(f"duration must be positive, got {self.duration}")
        if not 0.0 <= self.heading_azimuth < 360.0:
            raise ConfigurationError(f"heading_azimuth must lie in [0, 360), got {self.heading_azimuth}")
        if self.sway_deg < 0:
            raise ConfigurationError("sway_deg must be non-negative")

    @classmethod
    def for_structure(
        cls,
        pace: float,
        lateral_distance: float,
        structure_length: float = 2 * SimulationDefaults.UNIT_SPACING,
        sample_rate: float = SimulationDefaults.SAMPLE_RATE,
        start_offset: float = 6.0,
        end_offset: float = 6.0,
        **kwargs,
    ) -> "WalkSpec":
        """Walk that starts start_offset before the row and ends end_offset past it, snapped to the sample grid."""
        path = start_offset + structure_length + end_offset
        n = max(1, int(math.ceil(path / pace * sample_rate)))
        return cls(
            pace=pace,
            lateral_distance=lateral_distance,
            duration=n / sample_rate,
            start_offset=start_offset,
            end_offset=end_offset,
            **kwargs,
        )


@dataclass
class SensorSpec(DataClassJsonMixin):
    sample_rate: float = SimulationDefaults.SAMPLE_RATE  # Hz
    resolution: float = SimulationDefaults.RESOLUTION  # µT
    range: float = SimulationDefaults.SENSOR_RANGE  # µT

    def __post_init__(self) -> None:
        if not self.sample_rate > 0:
            raise ConfigurationError("sample_rate must be positive")
        if self.resolution < 0:
            raise ConfigurationError("resolution must be non-negative")
        if not self.range > 0:
            raise ConfigurationError("range must be positive")

    def measure(self, field_ut: np.ndarray) -> np.ndarray:
        """Quantize to the resolution step and clip to the sensor range."""
        out = np.asarray(field_ut, dtype=float)
        if self.resolution > 0:
            out = np.round(out / self.resolution) * self.resolution
        return np.clip(out, -self.range, self.range)


@dataclass
class ClutterSpec(DataClassJsonMixin):
    """Magnetic environment around the walk: everything that is not the superstructure."""

    earth_field: Vec3 = SimulationDefaults.EARTH_FIELD  # µT, world frame
    static_dipoles: List[DipoleSource] = field(default_factory=list)
    noise_std: float = SimulationDefaults.NOISE_STD  # µT per axis, white
    drift_scale: float = 0.5  # µT, stationary std of the slow drift
    drift_tau: float = SimulationDefaults.DRIFT_TAU  # s
    moving_per_minute: float = 0.0  # passers-by carrying ferrous objects
    moving_moment: float = 20.0  # A·m²
    ac_amplitude: float = 0.0  # µT, conductive-loop transmissions
    ac_frequency: float = 50.0  # Hz
    layout_jitter: float = 10.0  # m, per-segment offset of the static layout
    target_sir_db: Optional[float] = None  # None = unscaled
    name: str = "custom"

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        for attr in ("noise_std", "drift_scale", "moving_per_minute", "ac_amplitude", "layout_jitter"):
            if getattr(self, attr) < 0:
                raise ConfigurationError(f"{attr} must be non-negative")
        if self.drift_tau <= 0:
            raise ConfigurationError("drift_tau must be positive")
        if not np.all(np.isfinite(np.asarray(self.earth_field, dtype=float))):
            raise ConfigurationError("earth_field must be finite")
        if self.target_sir_db is not None and not math.isfinite(self.target_sir_db):
            raise ConfigurationError("target_sir_db must be finite or None")

    @property
    def earth_array(self) -> np.ndarray:
        return np.asarray(self.earth_field, dtype=float)
