"""
Конфигурация magsig: физические константы симуляции, параметры обработки и обучения,
настройки окружения (MAGSIG_*) и конфигурация экспериментов
"""
from __future__ import annotations

import json
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigurationError

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib


class SimulationDefaults:
    """Defaults of the field simulator"""

    # Single N35 unit, attached units add linearly
    UNIT_MOMENT = 125.0  # A·m²
    UNIT_SPACING = 3.0  # m
    MAGNET_HEIGHT = 1.5  # m
    SENSOR_HEIGHT = 1.0  # m, phone in pocket

    SAMPLE_RATE = float(os.getenv("MAGSIG_SAMPLE_RATE", "120"))  # Hz
    RESOLUTION = 0.3  # µT
    SENSOR_RANGE = 1600.0  # µT

    # Structure field level that marks a frame as "containing" the structure
    DETECT_THRESHOLD = 1.0  # µT

    EARTH_FIELD = (20.0, 0.0, -40.0)  # µT, world frame
    NOISE_STD = 1.5  # µT
    DRIFT_TAU = 30.0  # s

    PACE_RANGE = (0.8, 2.0)  # m/s
    LATERAL_RANGE = (0.5, 1.0)  # m


class FramingDefaults:
    """Framing and SIR measurement"""

    WINDOW = 12.5  # s
    SHIFT = 0.08  # s
    SIR_FRAME = 0.020  # s, 50% overlap
    MIN_SERIES = 16


class TrainingDefaults:
    """Training protocol"""

    BATCH_SIZE = 64
    BETA1 = 0.9
    BETA2 = 0.999
    EPS = 1e-8
    PATIENCE = 5
    VAL_FRACTION = 0.2
    MAX_EPOCHS = int(os.getenv("MAGSIG_MAX_EPOCHS", "60"))
    MIN_NONZERO_FRACTION = 0.25

    LEARNING_RATES = {
        "DNN": 0.001,
        "RNN": 0.0005,
        "GRU": 0.0005,
        "LSTM": 0.0005,
    }


class MagsigSettings(BaseSettings):
    """Environment overrides (MAGSIG_SEED, MAGSIG_OUT, ...), optionally from .env"""

    model_config = SettingsConfigDict(env_prefix="MAGSIG_", env_file=".env", extra="ignore")

    seed: Optional[int] = None
    out: Optional[str] = None
    log_level: str = "INFO"
    workers: Optional[int] = None


ExperimentName = Literal["baseline", "sir_sweep", "decimation", "fewshot", "pace_sweep"]

EXPERIMENT_ALIASES = {
    "baseline": "baseline",
    "sir": "sir_sweep",
    "sir_sweep": "sir_sweep",
    "decimate": "decimation",
    "decimation": "decimation",
    "fewshot": "fewshot",
    "pace": "pace_sweep",
    "pace_sweep": "pace_sweep",
}

ALL_FAMILIES = ["SVM", "SVM_PCA", "DNN", "RNN", "GRU", "LSTM"]


class ExperimentConfig(BaseModel):
    """One experiment run: datasets, families, sweep values, seeds and output location"""

    experiment: ExperimentName = "baseline"
    seeds: List[int] = Field(default_factory=lambda: [0, 1, 2])
    families: List[str] = Field(default_factory=lambda: list(ALL_FAMILIES))
    sweep_families: List[str] = Field(default_factory=lambda: ["LSTM"])

    train_shots: int = 30
    test_passes: int = 10
    environments: List[str] = Field(default_factory=lambda: ["env-1", "env-2", "env-3", "env-4"])
    test_sir_db: float = 8.0
    gap_s: float = 14.0

    sir_values: List[float] = Field(default_factory=lambda: [8.0, 6.0, 4.0, 0.0])
    rates: List[float] = Field(default_factory=lambda: [120.0, 60.0, 30.0, 20.0])
    shots: List[int] = Field(default_factory=lambda: [5, 10, 20, 30])
    paces: List[float] = Field(default_factory=lambda: [0.8, 1.2, 1.6, 2.0])

    train_vector_stride: int = 8
    test_vector_stride: int = 4
    full_scale: bool = False
    frame_scale: bool = False
    write_recordings: bool = False

    max_epochs: int = TrainingDefaults.MAX_EPOCHS
    model_overrides: Dict[str, Dict[str, Any]] = Field(default_factory=dict)
    output_dir: str = "runs"
    workers: Optional[int] = None

    @field_validator("seeds")
    @classmethod
    def _seeds_non_empty(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("at least one seed is required")
        return v

    @field_validator("families", "sweep_families")
    @classmethod
    def _known_families(cls, v: List[str]) -> List[str]:
        unknown = [f for f in v if f.upper() not in ALL_FAMILIES]
        if unknown:
            raise ValueError(f"unknown model families: {unknown}")
        return [f.upper() for f in v]

    @field_validator("sir_values")
    @classmethod
    def _sir_range(cls, v: List[float]) -> List[float]:
        if any(not (-10.0 <= s <= 30.0) for s in v):
            raise ValueError("SIR sweep values must lie in [-10, 30] dB")
        return v

    @field_validator("rates")
    @classmethod
    def _rates_positive(cls, v: List[float]) -> List[float]:
        if any(r <= 0 for r in v):
            raise ValueError("sample rates must be positive")
        return v

    @field_validator("shots")
    @classmethod
    def _shots_positive(cls, v: List[int]) -> List[int]:
        if any(s < 1 for s in v):
            raise ValueError("shot counts must be >= 1")
        return v

    @field_validator("paces")
    @classmethod
    def _pace_range(cls, v: List[float]) -> List[float]:
        lo, hi = SimulationDefaults.PACE_RANGE
        if any(not (lo <= p <= hi) for p in v):
            raise ValueError(f"paces must lie in [{lo}, {hi}] m/s")
        return v

    @field_validator("train_shots", "test_passes", "train_vector_stride", "test_vector_stride", "max_epochs")
    @classmethod
    def _positive_int(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @property
    def effective_train_stride(self) -> int:
        return 1 if self.full_scale else self.train_vector_stride

    @property
    def effective_test_stride(self) -> int:
        return 1 if self.full_scale else self.test_vector_stride

    @property
    def effective_gap_s(self) -> float:
        # Full scale spaces test passes about a minute apart
        return max(self.gap_s, 45.0) if self.full_scale else self.gap_s

    def with_env_overrides(self, settings: Optional[MagsigSettings] = None) -> "ExperimentConfig":
        settings = settings or MagsigSettings()
        update: Dict[str, Any] = {}
        if settings.seed is not None:
            update["seeds"] = [settings.seed + k for k in range(len(self.seeds))]
        if settings.out:
            update["output_dir"] = settings.out
        if settings.workers is not None and self.workers is None:
            update["workers"] = settings.workers
        return self.model_copy(update=update) if update else self


def load_experiment_config(
    path: Optional[Path] = None,
    experiment: Optional[str] = None,
    settings: Optional[MagsigSettings] = None,
) -> ExperimentConfig:
    """Read a JSON/TOML config file (optional), set the experiment and apply MAGSIG_* overrides."""
    raw: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"Config file not found: {path}")
        text = path.read_text(encoding="utf-8").lstrip("\ufeff")
        try:
            if path.suffix.lower() == ".toml":
                raw = tomllib.loads(text)
            else:
                raw = json.loads(text)
        except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
            raise ConfigurationError(f"Cannot parse {path}: {e}") from e
    if experiment is not None:
        if experiment not in EXPERIMENT_ALIASES:
            raise ConfigurationError(f"Unknown experiment: {experiment}")
        raw["experiment"] = EXPERIMENT_ALIASES[experiment]
    try:
        cfg = ExperimentConfig(**raw)
    except ValueError as e:
        raise ConfigurationError(str(e)) from e
    return cfg.with_env_overrides(settings)
