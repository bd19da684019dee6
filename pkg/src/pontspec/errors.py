"""Exception taxonomy shared across the package."""


class PontspecError(Exception):
    """Base class for every error raised by this package."""


class DomainError(PontspecError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class ConvergenceError(PontspecError, RuntimeError):
    """An iteration exhausted its budget before reaching tolerance."""


class SingularMatrixError(PontspecError, ValueError):
    """A coupling matrix is singular where an inverse is required."""


class MissingLevelError(PontspecError, RuntimeError):
    """The level search could not isolate an index it was asked for."""


class PreconditionError(PontspecError, ValueError):
    """A hypothesis of a certified bound fails for the given input."""


class ConfigError(PontspecError, ValueError):
    """Malformed run configuration (CLI flags or config file)."""
