"""Exception types raised across the package."""


class RobustSwiptError(Exception):
    """Base class for package errors."""


class DomainError(RobustSwiptError, ValueError):
    """An argument lies outside the domain of the operation."""


class NotPSD(RobustSwiptError, ValueError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class NotRankOne(RobustSwiptError, ValueError):
    """A beamforming matrix failed the rank-one test and cannot be factored."""


class UnsupportedCone(RobustSwiptError, ValueError):
    """The requested operation does not support one of the problem's cones."""


class ConfigError(RobustSwiptError, ValueError):
    """A configuration document is malformed or inconsistent."""
