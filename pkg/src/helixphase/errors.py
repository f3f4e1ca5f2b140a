"""Exception types raised by helixphase."""


class HelixPhaseError(Exception):
    """Base class for all package errors."""


class DegenerateConfigurationError(HelixPhaseError, ValueError):
    """The effective rotating-frame field vanishes, so its axis is undefined."""


class NonConvergedError(HelixPhaseError):
    """Step refinement hit the step cap before the error estimate met tolerance."""

    def __init__(self, message: str, *, error: float, steps: int):
        super().__init__(message)
        self.error = error
        self.steps = steps


class NotCyclicError(HelixPhaseError):
    """The evolved state did not return to the ray of the initial state."""

    def __init__(self, message: str, *, overlap: float):
        super().__init__(message)
        self.overlap = overlap


class AmbiguousUnwrapError(HelixPhaseError, ValueError):
    """A successive phase difference sits on the +-pi tie between branches."""

    def __init__(self, message: str, *, index: int):
        super().__init__(message)
        self.index = index


class ParseError(HelixPhaseError, ValueError):
    def __init__(self, message: str, *, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnitError(ParseError):
    """A CSV header declares a unit the loader does not know."""


class DomainError(HelixPhaseError, ValueError):
    """A query lies outside the range covered by the computed curves."""
