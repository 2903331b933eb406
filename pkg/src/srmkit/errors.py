"""Exception types shared across the package."""


class SrmError(Exception):
    """Base class for all srmkit errors."""


class ValidationError(SrmError, ValueError):
    """An input violates a documented invariant."""


class UnsupportedOperationError(SrmError):
    """The operation is undefined for the given inputs."""


class InsufficientDataError(SrmError):
    """Not enough usable data points to perform a fit."""


class UnknownIndexError(SrmError, ValueError):
    """Index name outside the built-in catalog."""


class TableEntryError(SrmError):
    """A journal-weight table is missing a required entry."""
