"""Exception types shared across the package."""


class SpikecError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(SpikecError, ValueError):
    """A scalar parameter violates its contract (e.g. non-positive threshold)."""


class DimensionError(SpikecError, ValueError):
    """Array or layer shapes do not chain."""


class DomainViolationError(SpikecError, ValueError):
    """An input point lies outside the declared box domain."""


class RealizationUndefinedError(SpikecError, RuntimeError):
    """An output neuron never fires, so the realized value does not exist."""


class IncompatibleNetworksError(SpikecError, ValueError):
    """Networks cannot be concatenated or parallelized as requested."""


class CertificateError(SpikecError, AssertionError):
    """Internal consistency check on a firing certificate failed."""
