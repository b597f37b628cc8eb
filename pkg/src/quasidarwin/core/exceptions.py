"""Custom exceptions for the quasiprobability laboratory."""

__all__ = [
    "ConfigError",
    "DimensionError",
    "InvalidSettingError",
    "NotHermitianError",
    "NotProjectorError",
    "OutputError",
    "QuasiDarwinError",
    "UnsupportedPreparationError",
]


class QuasiDarwinError(Exception):
    """Base class; `category` is the machine-parseable tag printed by the CLI."""

    category: str = "internal"
    exit_code: int = 1


class DimensionError(QuasiDarwinError):
    """Raised when operand dimensions mismatch or exceed the configured qubit limit."""

    category = "dimension"
    exit_code = 4


class NotHermitianError(QuasiDarwinError):
    """Raised when a generator that must be Hermitian is not."""

    category = "hermitian"
    exit_code = 4


class NotProjectorError(QuasiDarwinError):
    """Raised when an operator that must satisfy P @ P == P does not."""

    category = "projector"
    exit_code = 4


class InvalidSettingError(QuasiDarwinError):
    """Raised when a measurement setting is inconsistent with the model it is evaluated on."""

    category = "setting"
    exit_code = 3


class UnsupportedPreparationError(QuasiDarwinError):
    """Raised when a setting cannot be prepared from |0> with the circuit gate set."""

    category = "preparation"
    exit_code = 3


class ConfigError(QuasiDarwinError):
    """Raised for invalid or unresolvable run configuration."""

    category = "config"
    exit_code = 2


class OutputError(QuasiDarwinError):
    """Raised when results cannot be written."""

    category = "output"
    exit_code = 5
