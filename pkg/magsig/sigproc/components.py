"""
Per-sample signal components: norm, vertical and horizontal parts of the field.
"""
from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Tuple

import numpy as np

from ..errors import DomainError

if TYPE_CHECKING:
    from ..fieldsim.recording import Recording

logger = logging.getLogger(__name__)

COMPONENT_NAMES: Tuple[str, ...] = ("bx", "by", "bz", "b", "bh", "bv")
_SLACK = 1e-9


def magnetic_norm(bx, by, bz):
    return np.sqrt(np.square(bx) + np.square(by) + np.square(bz))


def vertical_component(bx, by, bz, pitch, roll):
    """
    Vertical field from device-frame samples, pitch/roll in radians.
    The B_y term is sin(roll) without a cos(pitch) factor.
    """
    return -np.sin(pitch) * bx + np.sin(roll) * by + np.cos(pitch) * np.cos(roll) * bz


def horizontal_component(b, bv):
    """sqrt(B² − B_v²); |B_v| may exceed B by 1e-9 relative before it is an error."""
    b = np.asarray(b, dtype=float)
    bv = np.asarray(bv, dtype=float)
    excess = np.abs(bv) - b
    if np.any(excess > _SLACK * np.maximum(b, 1.0)):
        raise DomainError("|B_v| exceeds |B|")
    out = np.sqrt(np.clip(b * b - bv * bv, 0.0, None))
    return out if out.ndim else float(out)


def signal_components(recording: "Recording") -> np.ndarray:
    """
    (6, n) array ordered bx, by, bz, b, bh, bv.
    The sin(roll) projection has norm sqrt(1 + sin²P·sin²R) >= 1, so |B_v| can overshoot |B| at
    non-zero pitch and roll; such samples are clamped to |B_v| = |B|.
    """
    b = recording.b
    bx, by, bz = b[:, 0], b[:, 1], b[:, 2]
    norm = magnetic_norm(bx, by, bz)
    bv = vertical_component(bx, by, bz, np.deg2rad(recording.pitch), np.deg2rad(recording.roll))
    over = np.abs(bv) > norm
    if over.any():
        logger.debug("clamped %d vertical samples to the field norm", int(over.sum()))
        bv = np.clip(bv, -norm, norm)
    bh = horizontal_component(norm, bv)
    return np.ascontiguousarray(np.stack([bx, by, bz, norm, bh, bv]))
