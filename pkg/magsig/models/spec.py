"""
Model families, hyperparameters and the training protocol
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from dataclasses_json import DataClassJsonMixin

from ..config import TrainingDefaults
from ..errors import ConfigurationError

N_CLASSES = 7  # H0 (no structure) + 6 superstructures


class ModelFamily(str, Enum):
    SVM = "SVM"
    SVM_PCA = "SVM_PCA"
    DNN = "DNN"
    RNN = "RNN"
    GRU = "GRU"
    LSTM = "LSTM"

    @property
    def is_gradient(self) -> bool:
        return self not in (ModelFamily.SVM, ModelFamily.SVM_PCA)

    @property
    def is_recurrent(self) -> bool:
        return self in (ModelFamily.RNN, ModelFamily.GRU, ModelFamily.LSTM)

    @classmethod
    def parse(cls, value) -> "ModelFamily":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ConfigurationError(f"Unknown model family: {value}") from None


@dataclass
class ModelSpec(DataClassJsonMixin):
    family: ModelFamily = ModelFamily.LSTM
    n_classes: int = N_CLASSES
    input_dim: Optional[int] = None  # filled from the data at train time
    hidden_sizes: Sequence[int] = (400, 400, 400, 400)  # DNN; () is a linear softmax model
    hidden_size: int = 128  # recurrent
    sequence_steps: int = 3
    pca_dim: int = 60
    rff_dim: int = 1000
    rbf_gamma: Optional[float] = None  # None = 1 / input width
    svm_c: float = 10.0
    weight_decay: float = 0.0

    def __post_init__(self) -> None:
        self.family = ModelFamily.parse(self.family)
        self.hidden_sizes = tuple(int(h) for h in self.hidden_sizes)
        self.validate()

    def validate(self) -> None:
        if self.n_classes != N_CLASSES:
            raise ConfigurationError(f"softmax head must have {N_CLASSES} classes")
        if any(h < 1 for h in self.hidden_sizes) or self.hidden_size < 1:
            raise ConfigurationError("hidden sizes must be positive")
        if self.sequence_steps < 1 or self.pca_dim < 1 or self.rff_dim < 1:
            raise ConfigurationError("sequence_steps, pca_dim and rff_dim must be >= 1")
        if self.svm_c <= 0 or self.weight_decay < 0:
            raise ConfigurationError("svm_c must be positive and weight_decay non-negative")
        if self.rbf_gamma is not None and self.rbf_gamma <= 0:
            raise ConfigurationError("rbf_gamma must be positive")
        if self.input_dim is not None and self.family.is_recurrent and self.input_dim % self.sequence_steps:
            raise ConfigurationError(f"input_dim {self.input_dim} does not split into {self.sequence_steps} steps")


@dataclass
class AdamConfig:
    learning_rate: float = 0.001
    beta1: float = TrainingDefaults.BETA1
    beta2: float = TrainingDefaults.BETA2
    eps: float = TrainingDefaults.EPS


@dataclass
class TrainConfig(DataClassJsonMixin):
    batch_size: int = TrainingDefaults.BATCH_SIZE
    learning_rate: Optional[float] = None  # None = family default
    beta1: float = TrainingDefaults.BETA1
    beta2: float = TrainingDefaults.BETA2
    eps: float = TrainingDefaults.EPS
    patience: int = TrainingDefaults.PATIENCE
    val_fraction: float = TrainingDefaults.VAL_FRACTION
    max_epochs: int = TrainingDefaults.MAX_EPOCHS
    min_nonzero_fraction: float = TrainingDefaults.MIN_NONZERO_FRACTION
    standardize: bool = True
    seed: int = 0
    temperature_grid: Sequence[float] = ()  # SVM calibration, () = default grid

    def __post_init__(self) -> None:
        self.temperature_grid = tuple(float(x) for x in self.temperature_grid)
        self.validate()

    def validate(self) -> None:
        if self.learning_rate is not None and not self.learning_rate > 0:
            raise ConfigurationError("learning_rate must be positive")
        if self.patience < 1 or self.batch_size < 1 or self.max_epochs < 1:
            raise ConfigurationError("patience, batch_size and max_epochs must be >= 1")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ConfigurationError("val_fraction must lie in [0, 1)")
        if not 0.0 <= self.min_nonzero_fraction <= 1.0:
            raise ConfigurationError("min_nonzero_fraction must lie in [0, 1]")

    def resolved_learning_rate(self, family: ModelFamily) -> float:
        if self.learning_rate is not None:
            return self.learning_rate
        return TrainingDefaults.LEARNING_RATES.get(ModelFamily.parse(family).value, 0.001)

    def adam(self, family: ModelFamily) -> AdamConfig:
        return AdamConfig(self.resolved_learning_rate(family), self.beta1, self.beta2, self.eps)
