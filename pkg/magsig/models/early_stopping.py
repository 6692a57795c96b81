import copy
import logging
from typing import Any, Dict, List, Optional

from ..config import TrainingDefaults

logger = logging.getLogger(__name__)


class EarlyStopper:
    """
    Patience on validation accuracy as a small state machine:
    IMPROVING -> STALLED (no new best accuracy) -> STOPPED (patience exhausted).
    The returned snapshot is the best epoch by (val_acc, -val_loss).
    """

    def __init__(self, patience: int = TrainingDefaults.PATIENCE, history_size: int = 10):
        self.patience = patience
        self.history_size = history_size

        self.state = "IMPROVING"
        self.stalled_epochs = 0
        self.best_accuracy = float("-inf")

        self.best_epoch: Optional[int] = None
        self.best_key = (float("-inf"), float("-inf"))
        self.best_params: Optional[Dict[str, Any]] = None

        self.total_epochs = 0
        self.state_changes: List[Dict[str, Any]] = []

    def _record_state_change(self, old_state: str, new_state: str, reason: str) -> None:
        self.state_changes.append({"epoch": self.total_epochs, "from": old_state, "to": new_state, "reason": reason})
        if len(self.state_changes) > self.history_size:
            self.state_changes.pop(0)

    def _set_state(self, new_state: str, reason: str) -> None:
        if new_state != self.state:
            old_state = self.state
            self.state = new_state
            self._record_state_change(old_state, new_state, reason)
            logger.debug("early stopping %s -> %s: %s", old_state, new_state, reason)

    def should_continue(self) -> bool:
        return self.state != "STOPPED"

    def record_epoch(self, epoch: int, val_acc: float, val_loss: float, params: Dict[str, Any]) -> bool:
        """Returns True when this epoch became the best snapshot."""
        self.total_epochs += 1

        key = (val_acc, -val_loss)
        is_best = key > self.best_key
        if is_best:
            self.best_key = key
            self.best_epoch = epoch
            self.best_params = copy.deepcopy(params)

        if val_acc > self.best_accuracy:
            self.best_accuracy = val_acc
            self.stalled_epochs = 0
            self._set_state("IMPROVING", f"val_acc {val_acc:.4f} at epoch {epoch}")
        else:
            self.stalled_epochs += 1
            if self.stalled_epochs >= self.patience:
                self._set_state("STOPPED", f"no val_acc gain for {self.stalled_epochs}/{self.patience} epochs")
            else:
                self._set_state("STALLED", f"no val_acc gain at epoch {epoch}")
        return is_best

    def get_status(self) -> Dict[str, Any]:
        return {
            "state": self.state,
            "stalled_epochs": self.stalled_epochs,
            "total_epochs": self.total_epochs,
            "best_epoch": self.best_epoch,
            "best_val_acc": self.best_key[0] if self.best_epoch is not None else None,
            "config": {"patience": self.patience},
            "recent_state_changes": self.state_changes[-3:],
        }
