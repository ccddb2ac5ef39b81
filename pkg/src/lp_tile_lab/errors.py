"""Exceptions raised by the laboratory."""


class LabError(Exception):
    """Base class for every error raised by lp_tile_lab."""


class DomainError(LabError, ValueError):
    """An operation was called outside its domain."""


class NumericalFailure(LabError):
    """A numerical procedure did not converge or produced non-finite values."""


class ConfigError(LabError):
    """The experiment configuration could not be understood."""
