"""Exception types shared across the package."""


class VdwBemError(Exception):
    """Base class for all errors raised by this package."""


class GeometryError(VdwBemError):
    """Invalid geometry parameters (non-positive dimension, bad resolution)."""


class ConfigurationError(VdwBemError):
    """Invalid body arrangement (mesh intersecting a mirror plane, ...)."""


class GeometryOverlapError(VdwBemError):
    """Panel centroids of different bodies closer than the overlap guard."""


class MaterialError(VdwBemError):
    """Singular material response (vacuum body, reflection pole)."""


class SingularDeterminantError(VdwBemError):
    """A log-determinant was requested at (numerically) zero determinant."""


class NumericalError(VdwBemError):
    """An underlying numerical routine failed (eigensolver non-convergence)."""

    def __init__(self, message: str, n: int | None = None):
        super().__init__(message)
        self.n = n


class InsufficientDataError(VdwBemError):
    """Too few samples for the requested stencil."""


class CoarseMeshError(VdwBemError):
    """Eigenvalue clusters cannot be identified at this mesh resolution."""


class RefineResolutionError(VdwBemError):
    """Voxel bodies are too close for the current voxel size."""


class ConfigError(VdwBemError):
    """Run-configuration text is malformed or violates a constraint."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        loc = ""
        if key is not None:
            loc += f" (key {key!r}"
            loc += f", line {line})" if line is not None else ")"
        elif line is not None:
            loc += f" (line {line})"
        super().__init__(message + loc)
        self.key = key
        self.line = line
