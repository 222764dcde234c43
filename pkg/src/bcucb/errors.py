"""Exception types shared across the package."""


class BanditError(Exception):
    """Base class for all bcucb errors."""


class DomainError(BanditError, ValueError):
    """An argument lies outside its mathematical domain."""


class ShapeError(BanditError, ValueError):
    """An array argument has the wrong shape."""


class StateError(BanditError, RuntimeError):
    """An operation was called on a state that cannot support it."""


class CapacityError(BanditError, RuntimeError):
    """An enumeration guard was exceeded."""


class DataError(BanditError, ValueError):
    """Inconsistent data was passed between components."""


class ConfigError(BanditError, ValueError):
    """An experiment configuration failed validation."""
