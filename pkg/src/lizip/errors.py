"""Exception types shared across the codec."""


class LizipError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(LizipError, ValueError):
    """An input violates a documented precondition."""


class RangeError(LizipError, ValueError):
    """A value exceeds the representable integer range."""


class FormatError(LizipError, ValueError):
    """Bytes do not parse as the expected file structure."""


class CorruptionError(LizipError, ValueError):
    """Structurally parseable data whose payload is damaged or inconsistent."""
