"""Exception hierarchy shared by the spinorbit modules."""
from __future__ import annotations


class SpinOrbitError(RuntimeError):
    """Base class for every error raised by the library."""


class ParameterError(SpinOrbitError, ValueError):
    """Raised when an argument is outside its documented domain or cap."""


class NormalizationError(SpinOrbitError):
    """Raised when an element receives a state that is not normalized."""


class ConvergenceError(SpinOrbitError):
    """Raised when a truncated expansion captures too little probability."""

    def __init__(self, message: str, *, captured: float, tail_estimate: float) -> None:
        super().__init__(message)
        self.captured = captured
        self.tail_estimate = tail_estimate

    def tail_report(self) -> str:
        return (
            f"tail-report: captured_probability={self.captured:.12g} "
            f"tail_estimate={self.tail_estimate:.12g}"
        )


class DensityMatrixError(SpinOrbitError):
    """Raised when a density matrix is not a valid two-qubit state."""


__all__ = [
    "SpinOrbitError",
    "ParameterError",
    "NormalizationError",
    "ConvergenceError",
    "DensityMatrixError",
]
