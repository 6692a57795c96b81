from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Sequence, Tuple

import numpy as np

from ..config import SimulationDefaults
from ..errors import ConfigurationError
from .dipole import DipoleSource, Vec3, superposed_field

# Lexicographic orderings of unit multiplicities; permutation_id k -> PERMUTATIONS[k - 1]
PERMUTATIONS: Tuple[Tuple[int, int, int], ...] = tuple(permutations((1, 2, 3)))


@dataclass(frozen=True)
class Superstructure:
    """Three magnet units (3, 2 and 1 attached magnets) in a row; the ordering encodes the location."""

    permutation_id: int
    units: Tuple[DipoleSource, DipoleSource, DipoleSource]
    row_axis: Vec3 = (1.0, 0.0, 0.0)
    unit_spacing: float = SimulationDefaults.UNIT_SPACING

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if not 1 <= self.permutation_id <= len(PERMUTATIONS):
            raise ConfigurationError(f"permutation_id must be in [1, 6], got {self.permutation_id}")
        if len(self.units) != 3:
            raise ConfigurationError("a superstructure has exactly 3 units")
        axis = np.asarray(self.row_axis, dtype=float)
        if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
            raise ConfigurationError("row_axis must be a unit vector")
        directions = [u.moment_array / u.moment_norm for u in self.units]
        if any(not np.allclose(d, directions[0], atol=1e-12) for d in directions[1:]):
            raise ConfigurationError("all unit moments must share one orientation")
        centers = np.array([u.position_array for u in self.units])
        steps = np.diff(centers, axis=0)
        if not np.allclose(steps, self.unit_spacing * axis, atol=1e-9):
            raise ConfigurationError("unit centers must be unit_spacing apart along row_axis")

    @property
    def multiplicities(self) -> Tuple[int, int, int]:
        return PERMUTATIONS[self.permutation_id - 1]

    @property
    def origin(self) -> np.ndarray:
        return self.units[0].position_array

    @property
    def length(self) -> float:
        return 2.0 * self.unit_spacing

    @property
    def magnetic_center(self) -> np.ndarray:
        """Moment-weighted centroid of the unit centers; the localization reference point."""
        weights = np.array([u.moment_norm for u in self.units])
        centers = np.array([u.position_array for u in self.units])
        return weights @ centers / weights.sum()

    def field(self, sensor_pos: np.ndarray) -> np.ndarray:
        return superposed_field(sensor_pos, self.units)


def build_superstructure(
    permutation_id: int,
    base_moment: float = SimulationDefaults.UNIT_MOMENT,
    row_axis: Sequence[float] = (1.0, 0.0, 0.0),
    unit_spacing: float = SimulationDefaults.UNIT_SPACING,
    origin: Sequence[float] = (0.0, 0.0, SimulationDefaults.MAGNET_HEIGHT),
    moment_direction: Sequence[float] = (0.0, 0.0, 1.0),
) -> Superstructure:
    if not isinstance(permutation_id, (int, np.integer)) or not 1 <= permutation_id <= len(PERMUTATIONS):
        raise ConfigurationError(f"permutation_id must be an integer in [1, 6], got {permutation_id!r}")
    if base_moment <= 0:
        raise ConfigurationError("base_moment must be positive")
    axis = np.asarray(row_axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    direction = np.asarray(moment_direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    start = np.asarray(origin, dtype=float)

    units = []
    for k, multiplicity in enumerate(PERMUTATIONS[int(permutation_id) - 1]):
        center = start + k * unit_spacing * axis
        moment = multiplicity * base_moment * direction
        units.append(DipoleSource(tuple(float(c) for c in center), tuple(float(m) for m in moment)))
    return Superstructure(
        permutation_id=int(permutation_id),
        units=tuple(units),
        row_axis=tuple(float(a) for a in axis),
        unit_spacing=float(unit_spacing),
    )
