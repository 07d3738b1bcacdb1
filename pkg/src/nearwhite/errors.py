"""Exception hierarchy.

The CLI maps :class:`ConfigurationError` to exit code 2 and
:class:`DataError` to exit code 3.
"""


class NearWhiteError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(NearWhiteError, ValueError):
    """Bad option, flag value, or mismatched inputs."""


class DataError(NearWhiteError, ValueError):
    """The input data itself cannot be used."""


class ParseError(DataError):
    """A cell could not be read as a real number."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class TooShortError(DataError):
    pass


class DegenerateInputError(DataError):
    """Zero variance or otherwise unusable for standardization."""


class DomainError(DataError):
    """A value lies outside the domain of the requested operation."""


class NonStationaryError(ConfigurationError):
    """AR polynomial has a root on or inside the unit circle."""
