"""Exception hierarchy for the quantum Battle of the Sexes engine."""


class QuantumGameError(ValueError):
    """Base class for invalid inputs to the engine."""


class InvalidStateError(QuantumGameError):
    """Raised for zero or badly non-normalized amplitude vectors."""


class InvalidPayoffsError(QuantumGameError):
    """Raised when payoffs violate alpha > beta > gamma where it is required."""


class InvalidProfileError(QuantumGameError):
    """Raised when a strategy probability falls outside [0, 1]."""


class InvalidDensityMatrixError(QuantumGameError):
    """Raised when a matrix is not Hermitian, unit-trace and PSD."""
