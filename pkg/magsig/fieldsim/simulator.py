"""
Walk simulator: trajectories past a superstructure, clutter, sensor model and SIR targeting.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from dataclasses_json import DataClassJsonMixin

from ..config import SimulationDefaults
from ..errors import ConfigurationError
from ..seeding import derive_rng
from .clutter import background_world, sensor_disturbance
from .recording import PassEvent, Recording, RecordingComponents, rescale_to_sir
from .rotation import rotate_world_to_device
from .specs import ClutterSpec, SensorSpec, WalkSpec
from .structures import Superstructure, build_superstructure

logger = logging.getLogger(__name__)

STEP_LENGTH = 0.75  # m, sets the gait frequency of the sway
DETECT_THRESHOLD = SimulationDefaults.DETECT_THRESHOLD  # µT, unscaled structure field


@dataclass
class SessionEntry:
    structure: Optional[Superstructure]  # None = clutter-only gap walk
    walk: WalkSpec


@dataclass
class SessionPlan:
    entries: List[SessionEntry]
    clutter: ClutterSpec
    sensor: SensorSpec = field(default_factory=SensorSpec)

    @classmethod
    def from_pairs(
        cls,
        pairs: Sequence[Tuple[Optional[Superstructure], WalkSpec]],
        clutter: ClutterSpec,
        sensor: Optional[SensorSpec] = None,
    ) -> "SessionPlan":
        return cls([SessionEntry(s, w) for s, w in pairs], clutter, sensor or SensorSpec())

    def to_recipe(self) -> "SessionRecipe":
        return SessionRecipe(
            segments=[SegmentRecipe(structure=_structure_recipe(e.structure), walk=e.walk) for e in self.entries],
            clutter=self.clutter,
            sensor=self.sensor,
        )


@dataclass
class SegmentRecipe(DataClassJsonMixin):
    structure: Optional[Dict[str, Any]]
    walk: WalkSpec


@dataclass
class SessionRecipe(DataClassJsonMixin):
    """Everything needed to rebuild a session bit-exactly (stored in the events sidecar)."""

    segments: List[SegmentRecipe]
    clutter: ClutterSpec
    sensor: SensorSpec

    def to_plan(self) -> SessionPlan:
        entries = [
            SessionEntry(None if seg.structure is None else build_superstructure(**seg.structure), seg.walk)
            for seg in self.segments
        ]
        return SessionPlan(entries, self.clutter, self.sensor)


def _structure_recipe(structure: Optional[Superstructure]) -> Optional[Dict[str, Any]]:
    if structure is None:
        return None
    moments = [u.moment_norm for u in structure.units]
    first = structure.units[0]
    base = min(moments)
    return {
        "permutation_id": structure.permutation_id,
        "base_moment": base,
        "row_axis": list(structure.row_axis),
        "unit_spacing": structure.unit_spacing,
        "origin": list(first.position),
        "moment_direction": [float(m) for m in first.moment_array / first.moment_norm],
    }


def _frame_axes(structure: Optional[Superstructure], walk: WalkSpec) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if structure is None:
        origin = np.array([0.0, 0.0, walk.magnet_height])
        axis = np.array([1.0, 0.0, 0.0])
    else:
        origin = structure.origin
        axis = np.asarray(structure.row_axis, dtype=float)
    side = np.cross(axis, [0.0, 0.0, 1.0])
    norm = np.linalg.norm(side)
    if norm < 1e-12:
        raise ConfigurationError("row_axis must not be vertical")
    return origin, axis, side / norm


def walk_trajectory(structure: Optional[Superstructure], walk: WalkSpec, t: np.ndarray) -> np.ndarray:
    """Straight line parallel to the row, lateral_distance to the side, sensor height below the magnets."""
    origin, axis, side = _frame_axes(structure, walk)
    along = -walk.start_offset + walk.pace * t
    lift = walk.sensor_height - walk.magnet_height
    return origin + along[:, None] * axis + walk.lateral_distance * side + lift * np.array([0.0, 0.0, 1.0])


def walk_orientation(walk: WalkSpec, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Pitch/roll (deg) per sample; sway oscillates at the step frequency."""
    if walk.sway_deg == 0.0:
        return np.full(len(t), float(walk.pitch)), np.full(len(t), float(walk.roll))
    phase = 2.0 * np.pi * (walk.pace / STEP_LENGTH) * t
    return walk.pitch + walk.sway_deg * np.sin(phase), walk.roll + 0.5 * walk.sway_deg * np.sin(0.5 * phase)


def _pass_event(
    structure: Superstructure,
    walk: WalkSpec,
    t_local: np.ndarray,
    structure_world: np.ndarray,
    t0: float,
    segment_duration: float,
) -> PassEvent:
    axis = np.asarray(structure.row_axis, dtype=float)
    center_along = float((structure.magnetic_center - structure.origin) @ axis)
    closest = float(np.clip((center_along + walk.start_offset) / walk.pace, 0.0, segment_duration))

    above = np.flatnonzero(np.linalg.norm(structure_world, axis=1) >= DETECT_THRESHOLD)
    if above.size:
        start, end = float(t_local[above[0]]), float(t_local[above[-1]])
    else:
        start = (0.0 + walk.start_offset) / walk.pace
        end = (structure.length + walk.start_offset) / walk.pace
    start = float(np.clip(start, 0.0, segment_duration))
    end = float(np.clip(end, 0.0, segment_duration))
    return PassEvent(structure.permutation_id, t0 + closest, (t0 + start, t0 + end), float(walk.pace))


def _segment(
    entry: SessionEntry,
    clutter: ClutterSpec,
    sensor: SensorSpec,
    seed: int,
    index: int,
    start_sample: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, Optional[PassEvent]]:
    walk = entry.walk
    fs = sensor.sample_rate
    n = int(round(walk.duration * fs))
    if n < 1:
        raise ConfigurationError(f"segment {index} is shorter than one sample")
    rng = derive_rng(seed, "segment", index)
    t_local = np.arange(n) / fs
    t_abs = (start_sample + np.arange(n)) / fs
    positions = walk_trajectory(entry.structure, walk, t_local)
    pitch, roll = walk_orientation(walk, t_local)
    yaw = np.full(n, float(walk.heading_azimuth))

    if entry.structure is not None:
        structure_world = entry.structure.field(positions)
    else:
        structure_world = np.zeros((n, 3))
    env_world = background_world(clutter, rng, t_abs, positions)

    structure_dev = rotate_world_to_device(structure_world, yaw, pitch, roll)
    background_dev = rotate_world_to_device(env_world, yaw, pitch, roll)
    background_dev = background_dev + sensor_disturbance(clutter, rng, n, fs)

    event = None
    if entry.structure is not None:
        event = _pass_event(entry.structure, walk, t_local, structure_world, start_sample / fs, n / fs)
    return structure_dev, background_dev, pitch, roll, event


def simulate_session(plan: SessionPlan, seed: int) -> Recording:
    """
    Concatenate the plan's walks into one recording. Each segment draws from its own derived stream;
    the target SIR (if any) is applied once over the whole session.
    """
    if not plan.entries:
        raise ConfigurationError("session plan is empty")
    sensor = plan.sensor
    structures, backgrounds, pitches, rolls, events = [], [], [], [], []
    start_sample = 0
    for index, entry in enumerate(plan.entries):
        s, bg, p, r, event = _segment(entry, plan.clutter, sensor, seed, index, start_sample)
        structures.append(s)
        backgrounds.append(bg)
        pitches.append(p)
        rolls.append(r)
        if event is not None:
            events.append(event)
        start_sample += len(s)

    for first, second in zip(events, events[1:]):
        if first.overlaps(second):
            raise ConfigurationError(f"pass spans overlap: {first.span} and {second.span}")

    components = RecordingComponents(
        structure=np.concatenate(structures),
        background=np.concatenate(backgrounds),
        gain=1.0,
        sensor=sensor,
    )
    recording = Recording(
        sample_rate=sensor.sample_rate,
        t=np.arange(start_sample) / sensor.sample_rate,
        b=sensor.measure(components.background + components.structure),
        pitch=np.concatenate(pitches),
        roll=np.concatenate(rolls),
        pass_events=events,
        seed=int(seed),
        components=components,
        recipe=plan.to_recipe().to_dict(),
    )
    if plan.clutter.target_sir_db is not None and events:
        recording = rescale_to_sir(recording, plan.clutter.target_sir_db)
    logger.debug(
        "simulated session: %d segments, %d passes, %.1f s, seed=%s",
        len(plan.entries),
        len(events),
        recording.duration,
        seed,
    )
    return recording


def simulate_pass(
    walk: WalkSpec,
    structure: Superstructure,
    clutter: ClutterSpec,
    sensor: Optional[SensorSpec] = None,
    seed: int = 0,
) -> Recording:
    """Single walk past one superstructure."""
    return simulate_session(SessionPlan([SessionEntry(structure, walk)], clutter, sensor or SensorSpec()), seed)


def regenerate(recording: Recording) -> Recording:
    """Rebuild a recording from its stored recipe and seed."""
    if recording.recipe is None or recording.seed is None:
        raise ConfigurationError("recording carries no recipe; cannot regenerate")
    plan = SessionRecipe.from_dict(recording.recipe).to_plan()
    return simulate_session(plan, recording.seed)
