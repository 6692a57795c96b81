"""
Журнал запусков: одна JSON-строка на завершённую задачу эксперимента (эксперимент × условие × семейство × seed)
"""
import hashlib
import json
import logging
import time
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Set, Union

RUN_LOG_NAME = "run_events.log"
METRICS_NAME = "run_metrics.json"
SCHEMA_VERSION = "1.0"
_TAIL_CHECK_LINES = 200
MAX_LOG_BYTES = 5 * 1024 * 1024

_IDENTITY = ("experiment", "condition", "family", "seed")
_FIELD_TYPES = {
    "event_id": str,
    "schema_version": str,
    "ts": (int, float),
    "experiment": str,
    "condition": str,
    "family": str,
    "seed": int,
    "success": bool,
}
logger = logging.getLogger(__name__)


class RunLedger:
    """Append-only JSONL ledger with a counters file (skipped_duplicates, log_rotations) beside it."""

    def __init__(self, log_path: Union[str, Path], metrics_path: Optional[Union[str, Path]] = None):
        self.log_path = Path(log_path)
        self.metrics_path = Path(metrics_path) if metrics_path is not None else self.log_path.with_name(METRICS_NAME)

    def append(self, event: Dict[str, Any]) -> bool:
        record = dict(event)
        record["event_id"] = event.get("event_id") or compute_event_id(event)
        record["schema_version"] = event.get("schema_version") or SCHEMA_VERSION
        record["ts"] = time.time()
        problem = check_record(record)
        if problem:
            logger.warning("run event not written (%s): %s/%s", problem, event.get("experiment"), event.get("seed"))
            return False

        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        self._rotate_if_large()
        if record["event_id"] in self._recent_ids():
            logger.debug("run event %s already logged", record["event_id"][:12])
            self.bump("skipped_duplicates")
            return False
        with self.log_path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
        return True

    def events(self, limit: Optional[int] = None) -> List[Dict[str, Any]]:
        lines = self._lines()
        if limit is not None:
            lines = lines[-limit:]
        return list(_parse(lines))

    def counters(self) -> Dict[str, int]:
        try:
            data = json.loads(self.metrics_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            return {}
        return data if isinstance(data, dict) else {}

    def bump(self, counter: str) -> None:
        counters = self.counters()
        counters[counter] = int(counters.get(counter, 0)) + 1
        self.metrics_path.parent.mkdir(parents=True, exist_ok=True)
        staging = self.metrics_path.with_name(self.metrics_path.name + ".tmp")
        staging.write_text(json.dumps(counters, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        staging.replace(self.metrics_path)

    def _lines(self) -> List[str]:
        try:
            return self.log_path.read_text(encoding="utf-8").splitlines()
        except OSError:
            return []

    def _recent_ids(self) -> Set[str]:
        # only the tail is scanned; an id older than that window can be logged again
        return {record.get("event_id") for record in _parse(self._lines()[-_TAIL_CHECK_LINES:])}

    def _rotate_if_large(self) -> None:
        try:
            size = self.log_path.stat().st_size
        except OSError:
            return
        if size <= MAX_LOG_BYTES:
            return
        stamp = time.strftime("%Y%m%d_%H%M%S")
        archived = self.log_path.with_name(f"{self.log_path.stem}_{stamp}{self.log_path.suffix}")
        self.log_path.replace(archived)
        logger.info("run log rotated to %s (%d bytes)", archived.name, size)
        self.bump("log_rotations")


def compute_event_id(event: Dict[str, Any]) -> str:
    """sha256 over the whitespace-normalized job identity; metrics do not change the id."""
    identity = "|".join(" ".join(str(event.get(key, "")).split()) for key in _IDENTITY)
    return hashlib.sha256(identity.encode("utf-8")).hexdigest()


def check_record(record: Dict[str, Any]) -> Optional[str]:
    """None for a writable record, otherwise the first problem found."""
    for key, kind in _FIELD_TYPES.items():
        if key not in record:
            return f"missing {key}"
        value = record[key]
        if isinstance(value, bool) and kind is not bool:
            return f"{key}={value!r}"
        if not isinstance(value, kind):
            return f"{key}={value!r}"
        if isinstance(value, str) and not value.strip():
            return f"empty {key}"
    return None


def append_run_event(
    log_path: Union[str, Path],
    event: Dict[str, Any],
    metrics_path: Optional[Union[str, Path]] = None,
) -> bool:
    """Append one finished job; False if it is invalid or already in the tail of the log."""
    return RunLedger(log_path, metrics_path).append(event)


def read_run_events(log_path: Union[str, Path], limit: Optional[int] = None) -> List[Dict[str, Any]]:
    return RunLedger(log_path).events(limit)


def _parse(lines: Iterable[str]) -> Iterator[Dict[str, Any]]:
    for line in lines:
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            continue
        if isinstance(record, dict):
            yield record
