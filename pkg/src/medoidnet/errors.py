"""Exception types shared across the package."""


class MedoidNetError(Exception):
    """Base class for package errors."""


class PreconditionError(MedoidNetError, ValueError):
    """An operation was called with arguments violating its contract."""


class InvalidElementError(MedoidNetError, ValueError):
    """An element is not representable in the given space."""


class UnsupportedOperationError(MedoidNetError, ValueError):
    """The space lacks a capability (enumeration, eps-net oracle, ...)."""
