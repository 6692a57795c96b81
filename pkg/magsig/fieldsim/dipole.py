"""
Dipole field model: point magnetic moments, full three-axis field and norm envelope.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from dataclasses_json import DataClassJsonMixin

from ..errors import ConfigurationError, DomainError, SingularityError

MU0 = 4.0 * np.pi * 1e-7  # T·m/A
TESLA_TO_UT = 1e6
K_RANGE = (0.1, 0.2)

_MIN_SEPARATION = 1e-12  # m

Vec3 = Tuple[float, float, float]


@dataclass(frozen=True)
class DipoleSource(DataClassJsonMixin):
    """Point moment of one magnet unit (or one infrastructure anomaly)."""

    position: Vec3  # m, world frame
    moment: Vec3  # A·m²

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        pos = np.asarray(self.position, dtype=float)
        mom = np.asarray(self.moment, dtype=float)
        if pos.shape != (3,) or mom.shape != (3,):
            raise ConfigurationError("position and moment must be 3-vectors")
        if not np.all(np.isfinite(pos)):
            raise ConfigurationError(f"non-finite dipole position: {self.position}")
        if not np.all(np.isfinite(mom)) or np.linalg.norm(mom) <= 0.0:
            raise ConfigurationError(f"dipole moment must be finite and non-zero: {self.moment}")

    @property
    def position_array(self) -> np.ndarray:
        return np.asarray(self.position, dtype=float)

    @property
    def moment_array(self) -> np.ndarray:
        return np.asarray(self.moment, dtype=float)

    @property
    def moment_norm(self) -> float:
        return float(np.linalg.norm(self.moment_array))


def _separation(sensor_pos: np.ndarray, source_pos: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    r = np.asarray(sensor_pos, dtype=float) - source_pos
    R = np.sqrt(np.sum(r * r, axis=-1))
    if np.any(R < _MIN_SEPARATION):
        raise SingularityError("sensor position coincides with the dipole position")
    return r, R


def dipole_tensor(sensor_pos: np.ndarray, source_pos: np.ndarray) -> np.ndarray:
    """(µ0 / 4πR⁵)·(3 r rᵀ − R² I) in T per A·m², shape (..., 3, 3). Symmetric and traceless."""
    r, R = _separation(sensor_pos, np.asarray(source_pos, dtype=float))
    outer = 3.0 * r[..., :, None] * r[..., None, :]
    outer -= (R**2)[..., None, None] * np.eye(3)
    return (MU0 / (4.0 * np.pi * R**5))[..., None, None] * outer


def dipole_field(sensor_pos: np.ndarray, source: DipoleSource) -> np.ndarray:
    """Three-axis field (µT) of one dipole at sensor position(s) of shape (..., 3)."""
    r, R = _separation(sensor_pos, source.position_array)
    m = source.moment_array
    r_dot_m = np.sum(r * m, axis=-1)
    # T·M contracted without building the tensor: 3 (r·m) r − R² m
    field = 3.0 * r_dot_m[..., None] * r - (R**2)[..., None] * m
    return (MU0 / (4.0 * np.pi * R**5))[..., None] * field * TESLA_TO_UT


def superposed_field(sensor_pos: np.ndarray, sources) -> np.ndarray:
    sensor_pos = np.asarray(sensor_pos, dtype=float)
    total = np.zeros(sensor_pos.shape, dtype=float)
    for source in sources:
        total += dipole_field(sensor_pos, source)
    return total


def field_norm_envelope(moment_norm: float, K: float, R: float) -> float:
    """µ0·K·M/R³ in µT, the norm-decay envelope of a moment M at distance R."""
    if not (K_RANGE[0] <= K <= K_RANGE[1]):
        raise DomainError(f"K must lie in [{K_RANGE[0]}, {K_RANGE[1]}], got {K}")
    if R <= 0.0:
        raise SingularityError("envelope undefined at R = 0")
    return float(MU0 * K * moment_norm / R**3 * TESLA_TO_UT)
