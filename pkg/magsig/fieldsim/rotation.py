import numpy as np
from scipy.spatial.transform import Rotation


def device_rotation(yaw_deg, pitch_deg, roll_deg) -> Rotation:
    """Device orientation in the world frame, Z-Y-X intrinsic (yaw, then pitch, then roll)."""
    angles = np.stack(np.broadcast_arrays(yaw_deg, pitch_deg, roll_deg), axis=-1)
    return Rotation.from_euler("ZYX", angles, degrees=True)


def rotate_world_to_device(field_world: np.ndarray, yaw: float, pitch: float, roll: float) -> np.ndarray:
    """Express a world-frame field in the device frame. Angles in degrees, broadcast per sample."""
    field_world = np.asarray(field_world, dtype=float)
    rot = device_rotation(yaw, pitch, roll)
    return rot.inv().apply(field_world)
