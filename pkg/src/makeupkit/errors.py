"""Exception hierarchy shared across the package."""


class MakeupkitError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(MakeupkitError):
    """Operand shapes are incompatible."""


class DegenerateControlsError(MakeupkitError):
    """TPS control points are (numerically) degenerate."""


class DegenerateEmbeddingError(MakeupkitError):
    """Landmark embedding vector has zero norm."""


class ContractViolationError(MakeupkitError):
    """An argument violates a documented precondition."""


class ConfigurationError(MakeupkitError):
    """Sizes/extents do not satisfy a configuration constraint."""


class EmptyRegionError(MakeupkitError):
    """A region mask selects no pixels."""


class MissingVjpError(MakeupkitError):
    """The operation does not expose a vector-Jacobian product."""
