"""
Иерархия ошибок magsig
"""


class MagsigError(Exception):
    """Base class for every error raised by magsig."""


class SingularityError(MagsigError, ArithmeticError):
    """Sensor and source coincide (R = 0)."""


class DomainError(MagsigError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConfigurationError(MagsigError, ValueError):
    """Invalid spec, plan or experiment configuration."""


class PreconditionError(MagsigError, ValueError):
    """Input violates an operation precondition (too short, wrong index, ...)."""


class UndefinedSIRError(MagsigError, ArithmeticError):
    """SIR cannot be computed: one frame class is empty or background power is zero."""


class DimensionError(MagsigError, ValueError):
    """Feature width does not match the model."""


class TrainingError(MagsigError, ValueError):
    """Training data or gradients are unusable."""


class EvaluationError(MagsigError, ValueError):
    """Metrics cannot be computed for the given labels/arguments."""


class ModelFormatError(MagsigError, OSError):
    """Model file is truncated or corrupt."""


class IncompatibleModelError(ModelFormatError):
    """Model file was written by an incompatible format version."""
