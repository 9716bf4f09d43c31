"""Exception hierarchy shared by the toolkit."""


class LagSboxError(Exception):
    """Base class for every error raised by this package."""


class DomainError(LagSboxError, ValueError):
    """A value lies outside the invariant interval of the logistic map."""


class ConfigError(LagSboxError, ValueError):
    """A generator configuration violates one of its invariants."""


class StateNotWarmError(LagSboxError, RuntimeError):
    """A lag series was stepped before its ring buffer was filled."""


class ExhaustionError(LagSboxError, RuntimeError):
    """The bit budget ran out before 2**n distinct words were collected."""


class FixtureParseError(LagSboxError, ValueError):
    """An S-box fixture file could not be parsed."""


class NotBijectiveError(LagSboxError, ValueError):
    """A lookup table is not a permutation of [0, 2**n)."""

    def __init__(self, message, value=None, index=None):
        super().__init__(message)
        self.value = value
        self.index = index


class FamilyTooSmallError(LagSboxError, ValueError):
    """An S-box family has fewer members than the image has rows."""


class ImageFormatError(LagSboxError, ValueError):
    """A PGM file is malformed or uses an unsupported variant."""
