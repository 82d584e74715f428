"""Exception hierarchy shared across the toolkit.

Numerical kernels and model code raise subclasses of :class:`NumericalError`;
the CLI maps them to a dedicated exit code, and config validation failures
(:class:`ConfigError`) to another.
"""


class AvmError(Exception):
    """Base class for all toolkit errors."""


class NumericalError(AvmError):
    """A numerical procedure failed (integration, quadrature, root finding)."""


class ConfigError(AvmError):
    """A run configuration is missing fields or holds invalid values."""
