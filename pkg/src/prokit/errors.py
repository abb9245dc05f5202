"""Exception hierarchy shared by all prokit modules."""


class ProError(ValueError):
    """Base class for every error raised by prokit."""


class StructuralError(ProError):
    """Input has the wrong shape or lacks a required matrix structure."""


class DomainError(ProError):
    """Input is well formed but outside the domain of the operation."""

    def __init__(self, message, report=None, witness=None):
        super().__init__(message)
        self.report = report
        self.witness = witness


class PoleProximityError(DomainError):
    """Evaluation point lies on (or numerically too close to) a pole."""

    def __init__(self, message, omega=None):
        super().__init__(message)
        self.omega = omega


class DegeneracyError(DomainError):
    """A numerical rank decision falls inside the ambiguity band."""
