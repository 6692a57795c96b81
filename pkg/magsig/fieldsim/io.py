"""
Recording files: `<name>.csv` with columns t,bx,by,bz,pitch,roll and a `<name>.events.json` sidecar.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Union

import pandas as pd

from ..errors import ConfigurationError
from .recording import PassEvent, Recording

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["t", "bx", "by", "bz", "pitch", "roll"]
FLOAT_FORMAT = "%.9g"


def sidecar_path(csv_path: Union[str, Path]) -> Path:
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.stem + ".events.json")


def recording_to_csv_text(recording: Recording) -> str:
    frame = pd.DataFrame(
        {
            "t": recording.t,
            "bx": recording.b[:, 0],
            "by": recording.b[:, 1],
            "bz": recording.b[:, 2],
            "pitch": recording.pitch,
            "roll": recording.roll,
        },
        columns=CSV_COLUMNS,
    )
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_recording(recording: Recording, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(recording_to_csv_text(recording), encoding="utf-8")
    sidecar = {
        "sample_rate": recording.sample_rate,
        "seed": recording.seed,
        "pass_events": [event.to_dict() for event in recording.pass_events],
        "recipe": recording.recipe,
    }
    sidecar_path(path).write_text(json.dumps(sidecar, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    logger.debug("recording written: %s (%d samples)", path, len(recording))
    return path


def read_recording(path: Union[str, Path]) -> Recording:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Recording not found: {path}")
    frame = pd.read_csv(path)
    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise ConfigurationError(f"{path}: missing columns {missing}")

    meta_path = sidecar_path(path)
    meta = {}
    if meta_path.exists():
        try:
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Cannot parse {meta_path}: {e}") from e
    else:
        logger.warning("no events sidecar for %s; pass events unknown", path)

    t = frame["t"].to_numpy(dtype=float)
    if "sample_rate" in meta:
        sample_rate = float(meta["sample_rate"])
    elif len(t) > 1:
        sample_rate = float(1.0 / (t[1] - t[0]))
    else:
        raise ConfigurationError(f"{path}: cannot infer sample rate")

    return Recording(
        sample_rate=sample_rate,
        t=t,
        b=frame[["bx", "by", "bz"]].to_numpy(dtype=float),
        pitch=frame["pitch"].to_numpy(dtype=float),
        roll=frame["roll"].to_numpy(dtype=float),
        pass_events=[PassEvent.from_dict(e) for e in meta.get("pass_events", [])],
        seed=meta.get("seed"),
        recipe=meta.get("recipe"),
    )
