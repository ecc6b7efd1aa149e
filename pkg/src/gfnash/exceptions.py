"""Exception types raised across the package."""


class GFNashError(Exception):
    """Base class for all package errors."""


class NonConvergence(GFNashError):
    """An iterative routine did not reach its tolerance."""


class InvalidDelta(GFNashError):
    """Correction gains violate ``0 <= delta_l * w[l, i] < 2 * w[l, l]``."""


class InvalidCertificate(GFNashError):
    """A spectral certificate with ``gamma >= 1`` was supplied."""


class NotInterior(GFNashError):
    """The equilibrium of the unconstrained system leaves the action sets."""


class SingularSystem(GFNashError):
    """The first-order linear system is degenerate."""


class NotMonotone(GFNashError):
    """The game mapping is not strongly monotone."""


class EvaluationFailure(GFNashError):
    """A black-box cost evaluation raised."""


class DegenerateSmoothing(GFNashError):
    """Smoothing radius must be strictly positive."""


class MissingGradient(GFNashError):
    """Gradient-based mode requested on a game without gradients."""


class NumericOverflow(GFNashError):
    """The iterate became non-finite."""

    def __init__(self, iteration, message=None):
        self.iteration = iteration
        super().__init__(message or f"non-finite state at iteration {iteration}")


class DegenerateReference(GFNashError):
    """Reference vector has zero norm."""


class ConfigError(GFNashError):
    """Malformed run document."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
