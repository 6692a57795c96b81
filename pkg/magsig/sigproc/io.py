import json
import logging
from pathlib import Path
from typing import Iterable, List, Union

import numpy as np

from .components import COMPONENT_NAMES
from .framing import ExtendedFrame

logger = logging.getLogger(__name__)


def dump_frames(frames: Iterable[ExtendedFrame], path: Union[str, Path]) -> int:
    """Write one JSON line per frame (index, span, label, component arrays). Returns the frame count."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8") as f:
        for frame in frames:
            record = {
                "index": frame.index,
                "span": list(frame.span),
                "label": frame.label,
                "components": {name: frame.components[k].tolist() for k, name in enumerate(COMPONENT_NAMES)},
            }
            f.write(json.dumps(record) + "\n")
            count += 1
    logger.info("dumped %d frames to %s", count, path)
    return count


def load_frames(path: Union[str, Path]) -> List[ExtendedFrame]:
    frames = []
    with Path(path).open(encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            comps = np.array([rec["components"][name] for name in COMPONENT_NAMES], dtype=float)
            frames.append(ExtendedFrame(rec["index"], tuple(rec["span"]), comps, rec["label"]))
    return frames
