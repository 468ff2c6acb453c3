"""Exception types raised by the library."""


class CarpetError(Exception):
    """Base class for all domain errors."""


class ParameterError(CarpetError, ValueError):
    """An argument violates a documented constraint."""


class LatticeSizeError(CarpetError):
    """Requested lattice exceeds the configured size limit."""


class UndefinedStatisticError(CarpetError, ValueError):
    """A statistic was requested on empty data."""


class InsufficientDataError(CarpetError, ValueError):
    """Too few valid points to extract an estimate."""


class SingularFitError(CarpetError, ValueError):
    """Least-squares design matrix is rank deficient."""
