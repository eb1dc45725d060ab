"""Exception hierarchy."""


class AveError(Exception):
    """Base class for all errors raised by avemap."""


class BadShape(AveError, ValueError):
    """Input dimensions or structure violate a solver's preconditions."""


class InfeasibleAffine(AveError):
    """The right-hand side lies outside the range of ``T``, so ``C1`` is empty."""


class SingularSystem(AveError):
    """A linear system that must be solved is numerically singular."""


class SizeCap(AveError):
    """A set-valued enumeration would exceed its size limit."""


class ProblemFormatError(AveError, ValueError):
    """A problem file could not be parsed."""


class CampaignConfigError(AveError, ValueError):
    """A benchmark campaign description is malformed or inconsistent."""
