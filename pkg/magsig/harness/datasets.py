"""
Наборы данных: обучающие проходы в экранированной комнате и тестовые сессии в четырёх средах
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from dataclasses_json import DataClassJsonMixin

from ..config import FramingDefaults, SimulationDefaults
from ..errors import ConfigurationError, PreconditionError, UndefinedSIRError
from ..features import FeatureMatrix, concat_matrices, featurize_recording
from ..fieldsim import (
    PERMUTATIONS,
    PassEvent,
    Recording,
    SensorSpec,
    SessionPlan,
    WalkSpec,
    build_superstructure,
    clutter_preset,
    read_recording,
    recording_to_csv_text,
    regenerate,
    simulate_session,
    write_recording,
)
from ..seeding import derive_int, derive_rng
from ..sigproc import measure_sir

logger = logging.getLogger(__name__)

TRAIN_ROLE = "train-shielded"
TEST_ENVIRONMENTS = ("env-1", "env-2", "env-3", "env-4")
TILT_DEG = 10.0  # pitch/roll drawn from U[-10, 10]
GAP_PACE = 1.2  # m/s of the clutter-only walks between passes
GAP_LATERAL = 1.0  # m
STRUCTURE_IDS = tuple(range(1, len(PERMUTATIONS) + 1))


@dataclass
class RecordingEntry(DataClassJsonMixin):
    recording_id: str
    role: str  # train-shielded | test-env-k
    environment: str
    seed: int
    n_passes: int
    duration_s: float
    sample_rate: float
    recipe: Dict[str, Any]
    target_sir_db: Optional[float] = None
    measured_sir_db: Optional[float] = None
    pace: Optional[float] = None  # fixed pace override, None = drawn per pass
    shots: Optional[int] = None
    path: Optional[str] = None


@dataclass
class DatasetManifest(DataClassJsonMixin):
    kind: str  # train | test
    seed: int
    recordings: List[RecordingEntry]
    shots_per_structure: Optional[int] = None
    passes_per_structure: Optional[int] = None
    sir_db: Optional[float] = None
    pace: Optional[float] = None
    n_vectors: int = 0
    generated_at: Optional[str] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.kind not in ("train", "test"):
            raise ConfigurationError(f"manifest kind must be train or test, got {self.kind!r}")
        for entry in self.recordings:
            if self.kind == "train" and (entry.role != TRAIN_ROLE or entry.environment != "shielded"):
                raise ConfigurationError(f"training recording {entry.recording_id} is not shielded")
            if self.kind == "test" and (
                entry.environment not in TEST_ENVIRONMENTS or entry.role != f"test-{entry.environment}"
            ):
                raise ConfigurationError(f"test recording {entry.recording_id} has no environment preset")

    @property
    def n_passes(self) -> int:
        return sum(entry.n_passes for entry in self.recordings)

    @property
    def mean_measured_sir_db(self) -> Optional[float]:
        values = [e.measured_sir_db for e in self.recordings if e.measured_sir_db is not None]
        return float(np.mean(values)) if values else None


@dataclass
class Dataset:
    """A manifest with its recordings in memory and, once featurized, one matrix per recording."""

    manifest: DatasetManifest
    recordings: Dict[str, Recording]
    features: List[FeatureMatrix] = field(default_factory=list)

    @property
    def matrix(self) -> FeatureMatrix:
        return concat_matrices(self.features)

    @property
    def row_recording_ids(self) -> np.ndarray:
        if not self.features:
            return np.zeros(0, dtype=str)
        return np.concatenate([np.full(len(m), m.recording_id) for m in self.features])

    @property
    def pass_events(self) -> Dict[str, List[PassEvent]]:
        return {rec_id: rec.pass_events for rec_id, rec in self.recordings.items()}


def _draw_pass(
    rng: np.random.Generator,
    sample_rate: float,
    pace: Optional[float] = None,
    sway_deg: float = 0.0,
) -> WalkSpec:
    drawn_pace = float(rng.uniform(*SimulationDefaults.PACE_RANGE))
    lateral = float(rng.uniform(*SimulationDefaults.LATERAL_RANGE))
    yaw = float(rng.uniform(0.0, 360.0))
    pitch, roll = rng.uniform(-TILT_DEG, TILT_DEG, size=2)
    # The draw order stays fixed so a pace override keeps every other parameter
    return WalkSpec.for_structure(
        pace=drawn_pace if pace is None else float(pace),
        lateral_distance=lateral,
        sample_rate=sample_rate,
        heading_azimuth=yaw % 360.0,
        pitch=float(pitch),
        roll=float(roll),
        sway_deg=sway_deg,
    )


def _gap_walk(gap_s: float, sample_rate: float) -> WalkSpec:
    n = max(1, int(round(gap_s * sample_rate)))
    return WalkSpec(pace=GAP_PACE, lateral_distance=GAP_LATERAL, duration=n / sample_rate)


def _measured_sir(recording: Recording) -> Optional[float]:
    try:
        return measure_sir(recording)
    except UndefinedSIRError as e:
        logger.warning("SIR undefined: %s", e)
        return None


def _finish(
    manifest: DatasetManifest,
    recordings: Dict[str, Recording],
    out_dir: Optional[Path],
    featurize: bool,
    vector_stride: int,
    window: float,
    shift: float,
) -> Dataset:
    if out_dir is not None:
        out_dir = Path(out_dir)
        for entry in manifest.recordings:
            path = write_recording(recordings[entry.recording_id], out_dir / f"{entry.recording_id}.csv")
            entry.path = str(path)
    dataset = Dataset(manifest, recordings)
    if featurize:
        featurize_dataset(dataset, vector_stride=vector_stride, window=window, shift=shift)
    return dataset


def featurize_dataset(
    dataset: Dataset,
    vector_stride: int = 1,
    window: float = FramingDefaults.WINDOW,
    shift: float = FramingDefaults.SHIFT,
) -> Dataset:
    """Featurize every recording of the dataset in manifest order."""
    dataset.features = [
        featurize_recording(
            dataset.recordings[entry.recording_id],
            window=window,
            shift=shift,
            vector_stride=vector_stride,
            recording_id=entry.recording_id,
        )
        for entry in dataset.manifest.recordings
    ]
    dataset.manifest.n_vectors = int(sum(len(m) for m in dataset.features))
    logger.info("%s set featurized: %d vectors", dataset.manifest.kind, dataset.manifest.n_vectors)
    return dataset


def build_training_set(
    shots_per_structure: int = 30,
    seed: int = 0,
    gap_s: float = 14.0,
    sample_rate: float = SimulationDefaults.SAMPLE_RATE,
    vector_stride: int = 1,
    out_dir: Optional[Union[str, Path]] = None,
    featurize: bool = True,
    window: float = FramingDefaults.WINDOW,
    shift: float = FramingDefaults.SHIFT,
) -> Dataset:
    """
    One shielded session per superstructure: gap, pass, gap, pass, ..., gap.
    Pass k of structure s always draws from the stream (seed, s, k), so a smaller shot count is a
    prefix of a larger one.
    """
    if shots_per_structure < 1:
        raise PreconditionError("shots_per_structure must be >= 1")
    clutter = clutter_preset("shielded")
    recordings: Dict[str, Recording] = {}
    entries: List[RecordingEntry] = []
    for sid in STRUCTURE_IDS:
        structure = build_superstructure(sid)
        pairs = [(None, _gap_walk(gap_s, sample_rate))]
        for k in range(shots_per_structure):
            pairs.append((structure, _draw_pass(derive_rng(seed, "train-pass", sid, k), sample_rate)))
            pairs.append((None, _gap_walk(gap_s, sample_rate)))
        plan = SessionPlan.from_pairs(pairs, clutter, SensorSpec(sample_rate=sample_rate))
        rec_seed = derive_int(seed, "train-session", sid)
        recording = simulate_session(plan, rec_seed)
        rec_id = f"train-s{sid}"
        recordings[rec_id] = recording
        entries.append(
            RecordingEntry(
                recording_id=rec_id,
                role=TRAIN_ROLE,
                environment="shielded",
                seed=rec_seed,
                n_passes=len(recording.pass_events),
                duration_s=recording.duration,
                sample_rate=recording.sample_rate,
                recipe=recording.recipe,
                measured_sir_db=_measured_sir(recording),
                shots=shots_per_structure,
            )
        )
    manifest = DatasetManifest(kind="train", seed=seed, recordings=entries, shots_per_structure=shots_per_structure)
    logger.info("training set: %d passes over %d recordings", manifest.n_passes, len(entries))
    return _finish(manifest, recordings, out_dir, featurize, vector_stride, window, shift)


def build_test_set(
    passes_per_structure: int = 10,
    envs: Sequence[str] = TEST_ENVIRONMENTS,
    sir_db: float = 8.0,
    seed: int = 0,
    pace: Optional[float] = None,
    gap_s: float = 14.0,
    sample_rate: float = SimulationDefaults.SAMPLE_RATE,
    vector_stride: int = 1,
    out_dir: Optional[Union[str, Path]] = None,
    featurize: bool = True,
    sway_deg: float = 1.0,
    window: float = FramingDefaults.WINDOW,
    shift: float = FramingDefaults.SHIFT,
) -> Dataset:
    """One session per environment preset with passes_per_structure x 6 passes in a seeded shuffled order."""
    if passes_per_structure < 1:
        raise PreconditionError("passes_per_structure must be >= 1")
    unknown = [env for env in envs if env not in TEST_ENVIRONMENTS]
    if unknown:
        raise ConfigurationError(f"unknown test environments: {unknown}")
    if pace is not None and not pace > 0:
        raise ConfigurationError(f"pace must be positive, got {pace}")

    structures = {sid: build_superstructure(sid) for sid in STRUCTURE_IDS}
    recordings: Dict[str, Recording] = {}
    entries: List[RecordingEntry] = []
    for env in envs:
        order = derive_rng(seed, "test-order", env).permutation(np.repeat(STRUCTURE_IDS, passes_per_structure))
        pairs = [(None, _gap_walk(gap_s, sample_rate))]
        for k, sid in enumerate(order):
            walk = _draw_pass(derive_rng(seed, "test-pass", env, k), sample_rate, pace=pace, sway_deg=sway_deg)
            pairs.append((structures[int(sid)], walk))
            pairs.append((None, _gap_walk(gap_s, sample_rate)))
        clutter = clutter_preset(env, target_sir_db=sir_db)
        plan = SessionPlan.from_pairs(pairs, clutter, SensorSpec(sample_rate=sample_rate))
        rec_seed = derive_int(seed, "test-session", env)
        recording = simulate_session(plan, rec_seed)
        rec_id = f"test-{env}"
        recordings[rec_id] = recording
        entries.append(
            RecordingEntry(
                recording_id=rec_id,
                role=f"test-{env}",
                environment=env,
                seed=rec_seed,
                n_passes=len(recording.pass_events),
                duration_s=recording.duration,
                sample_rate=recording.sample_rate,
                recipe=recording.recipe,
                target_sir_db=sir_db,
                measured_sir_db=_measured_sir(recording),
                pace=pace,
            )
        )
    manifest = DatasetManifest(
        kind="test",
        seed=seed,
        recordings=entries,
        passes_per_structure=passes_per_structure,
        sir_db=sir_db,
        pace=pace,
    )
    logger.info(
        "test set: %d passes in %s, mean measured SIR %s dB",
        manifest.n_passes,
        ", ".join(envs),
        "n/a" if manifest.mean_measured_sir_db is None else f"{manifest.mean_measured_sir_db:.2f}",
    )
    return _finish(manifest, recordings, out_dir, featurize, vector_stride, window, shift)


def manifest_to_json(manifest: DatasetManifest) -> str:
    return json.dumps(manifest.to_dict(encode_json=True), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_manifest(manifest: DatasetManifest, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(manifest_to_json(manifest), encoding="utf-8")
    return path


def load_manifest(path: Union[str, Path]) -> DatasetManifest:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Manifest not found: {path}")
    try:
        return DatasetManifest.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise ConfigurationError(f"Cannot parse manifest {path}: {e}") from e


def _resolve(entry: RecordingEntry, base_dir: Optional[Path]) -> Path:
    if entry.path is None:
        raise ConfigurationError(f"recording {entry.recording_id} was not written to disk")
    path = Path(entry.path)
    if not path.is_absolute() and base_dir is not None and not path.exists():
        path = Path(base_dir) / path.name
    return path


def load_dataset(manifest: DatasetManifest, base_dir: Optional[Union[str, Path]] = None) -> Dataset:
    """Read the written recordings of a manifest back into memory (not featurized)."""
    recordings = {
        entry.recording_id: read_recording(_resolve(entry, base_dir)) for entry in manifest.recordings
    }
    return Dataset(manifest, recordings)


def verify_manifest(manifest: DatasetManifest, base_dir: Optional[Union[str, Path]] = None) -> List[str]:
    """
    Every referenced file must exist and regenerate bit-exactly from its sidecar seed and recipe.
    Returns the list of problems; empty means the manifest is intact.
    """
    problems: List[str] = []
    for entry in manifest.recordings:
        try:
            path = _resolve(entry, base_dir)
        except ConfigurationError as e:
            problems.append(str(e))
            continue
        if not path.exists():
            problems.append(f"{entry.recording_id}: file missing ({path})")
            continue
        stored = read_recording(path)
        if stored.seed != entry.seed:
            problems.append(f"{entry.recording_id}: sidecar seed {stored.seed} != manifest seed {entry.seed}")
            continue
        try:
            rebuilt = regenerate(stored)
        except ConfigurationError as e:
            problems.append(f"{entry.recording_id}: {e}")
            continue
        if recording_to_csv_text(rebuilt) != path.read_text(encoding="utf-8"):
            problems.append(f"{entry.recording_id}: regenerated samples differ from {path.name}")
    if problems:
        logger.warning("manifest verification: %d problem(s)", len(problems))
    return problems
