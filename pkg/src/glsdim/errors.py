"""Exception types shared across the package."""


class GlsdimError(Exception):
    """Base class for all library-specific errors."""


class FamilyParameterError(GlsdimError, ValueError):
    """A weight-family parameter is out of range; the message names the field."""


class NormalizationError(FamilyParameterError):
    """Explicit weights do not sum to 1 within tolerance."""


class ConfigError(GlsdimError, ValueError):
    """A configuration file or command-line spec string is malformed."""


class DeltaInfinityError(GlsdimError):
    """The point has no digit at some rank (it lies in no cylinder there).

    Carries the rank at which the search failed.
    """

    def __init__(self, rank: int, message: str | None = None):
        self.rank = rank
        super().__init__(message or f"point lies in no cylinder at rank {rank}")


class NoRootError(GlsdimError):
    """The power-sum equation has no root on [0, 1] (truncation-limit regime)."""


class IndecisiveBoundError(GlsdimError):
    """Series bounds could not separate the power sum from 1 within budget."""


class SlowConvergenceWarning(UserWarning):
    """Truncation roots did not settle before the iteration cap."""


class RouteDisagreementError(GlsdimError):
    """Independent dimension routes disagree beyond tolerance (internal check)."""


class UnsupportedSchemeError(GlsdimError):
    """The scheme does not guarantee a countable set of expansion-less points."""


class DegenerateFitError(GlsdimError):
    """Box counting cannot fit a slope (all points share one box)."""
