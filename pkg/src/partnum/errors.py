"""Exception types shared across the package."""


class PartnumError(Exception):
    """Base class for all partnum errors."""


class DomainError(PartnumError, ValueError):
    """An input lies outside the mathematical domain of an operation
    (negative radicand, nonpositive logarithm argument, zero denominator)."""


class RangeError(PartnumError, ValueError):
    """An input lies outside the declared validity range of a formula."""


class ConfigError(PartnumError, ValueError):
    """A configuration value (estimator kind, scan range, threshold spec)
    is malformed or inconsistent."""


class SingularFitError(PartnumError, ValueError):
    """The least-squares design matrix is rank deficient."""


class FitDivergedError(PartnumError, RuntimeError):
    """An iterative or grid fit could not produce a single valid iterate."""
