"""Exception types raised across the package."""


class LatticeError(Exception):
    """Base class for all package errors."""


class GraphError(LatticeError, ValueError):
    """Invalid graph construction arguments."""


class UnsupportedOperation(LatticeError):
    """Operation not available for this graph mode (e.g. shifting a Dirichlet box)."""


class FieldMismatch(LatticeError, ValueError):
    """A field does not live on the graph it was passed with, or holds non-finite values."""


class ModelError(LatticeError, ValueError):
    """Potential or nonlinearity violates an admissibility condition."""


class ProjectionError(LatticeError, RuntimeError):
    """Ray projection onto the Nehari manifold failed to bracket a root."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SphereError(LatticeError, ValueError):
    """Input is not on the unit sphere of the weighted norm (or is zero)."""


class ConfigError(LatticeError):
    """User configuration error; carries the offending key path."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
