"""Exception types shared across the package."""


class SubmaxError(Exception):
    """Base class for all errors raised by submax."""


class InvalidSubsetError(SubmaxError):
    """A subset refers to elements outside the ground set."""


class EstimatorError(SubmaxError):
    """Evaluation mode incompatible with the function kind or size."""


class InvalidBoxError(SubmaxError):
    """Box bounds violate u <= v."""


class ConfigError(SubmaxError):
    """Run parameters are inconsistent (bad alpha/delta/theta grid)."""


class InstanceFormatError(SubmaxError):
    """An instance or result document failed to parse or validate."""
