"""Exception types shared across the package."""


class LocalMUError(Exception):
    """Base class for all library errors."""


class DimensionError(LocalMUError, ValueError):
    """Vector length does not match the space dimension."""


class NonFiniteError(LocalMUError, ValueError):
    """A vector carries NaN or infinite entries."""


class DomainError(LocalMUError, ValueError):
    """A point lies outside the set where an operation is defined."""


class PreconditionError(LocalMUError):
    """A hypothesis required by a procedure failed on sampled evidence.

    ``witness`` holds the offending point(s) when one is available.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SamplingError(LocalMUError):
    """Rejection sampling could not produce enough points."""


class RankDeficientError(LocalMUError, ValueError):
    """Sample sources do not affinely span the source space."""

    def __init__(self, message, directions=None):
        super().__init__(message)
        self.directions = directions
