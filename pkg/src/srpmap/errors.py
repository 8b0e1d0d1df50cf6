"""Exception types shared across the package."""


class SrpMapError(Exception):
    """Base class for errors raised by this package."""


class InvalidGeometryError(SrpMapError, ValueError):
    """Microphone array geometry is unusable (too few mics, duplicates, ...)."""


class InvalidGridError(SrpMapError, ValueError):
    """Candidate grid descriptor or grid contents are invalid."""


class DimensionError(SrpMapError, ValueError):
    """Operands passed to an operation have inconsistent shapes."""


class CapacityError(SrpMapError):
    """A dense operator would exceed the configured memory cap."""


class ConfigError(SrpMapError, ValueError):
    """Configuration file or parameter set is invalid."""


class CacheFormatError(SrpMapError, ValueError):
    """Operator cache file is corrupt or has an unsupported format."""
