"""
Симуляция магнитометра: диполи, суперструктуры, помехи, записи проходов
"""
from .clutter import PRESET_NAMES, clutter_preset
from .dipole import MU0, DipoleSource, dipole_field, dipole_tensor, field_norm_envelope, superposed_field
from .io import read_recording, recording_to_csv_text, write_recording
from .recording import (
    PassEvent,
    Recording,
    RecordingComponents,
    decimate,
    recompose,
    rescale_to_sir,
    scale_pattern_energy,
)
from .rotation import rotate_world_to_device
from .simulator import SessionEntry, SessionPlan, SessionRecipe, regenerate, simulate_pass, simulate_session
from .specs import ClutterSpec, SensorSpec, WalkSpec
from .structures import PERMUTATIONS, Superstructure, build_superstructure

__all__ = [
    "MU0",
    "PERMUTATIONS",
    "PRESET_NAMES",
    "ClutterSpec",
    "DipoleSource",
    "PassEvent",
    "Recording",
    "RecordingComponents",
    "SensorSpec",
    "SessionEntry",
    "SessionPlan",
    "SessionRecipe",
    "Superstructure",
    "WalkSpec",
    "build_superstructure",
    "clutter_preset",
    "decimate",
    "dipole_field",
    "dipole_tensor",
    "field_norm_envelope",
    "read_recording",
    "recompose",
    "recording_to_csv_text",
    "regenerate",
    "rescale_to_sir",
    "rotate_world_to_device",
    "scale_pattern_energy",
    "simulate_pass",
    "simulate_session",
    "superposed_field",
    "write_recording",
]
