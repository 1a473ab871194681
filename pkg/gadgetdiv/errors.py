"""Exception hierarchy shared by every gadgetdiv module."""
from typing import Optional


class GadgetDivError(Exception):
    """Base class for all errors raised by gadgetdiv."""


class IsaError(GadgetDivError):
    """An ISA table violates one of its invariants."""


class IRSyntaxError(GadgetDivError):
    """IR text does not conform to the grammar."""

    def __init__(self, message: str, line: int, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class IRSemanticError(GadgetDivError):
    """IR text parses but does not describe a valid function."""


class ModelError(GadgetDivError):
    """The constraint model cannot be built or was given bad parameters."""


class InfeasibleError(GadgetDivError):
    """The search proved that a model has no solution."""


class SolverTimeoutError(GadgetDivError):
    """The time limit expired before any solution was found."""


class IncompleteSolutionError(GadgetDivError):
    """A solution has missing or out-of-shape entries."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(message)


class DistanceError(GadgetDivError):
    """Distances were requested on incompatible solutions or too small sets."""


class ConfigError(GadgetDivError):
    """Bad configuration file entry or CLI combination."""


class ReportError(GadgetDivError):
    """Run directories or manifests are missing or corrupt."""
