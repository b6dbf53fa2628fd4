"""Exception hierarchy shared by all qlv modules."""


class QLVError(Exception):
    """Base class for every error raised by qlv."""


class InvalidParameterError(QLVError, ValueError):
    """An argument violates its documented precondition."""


class InvalidConfigError(InvalidParameterError):
    """A scenario configuration is incomplete or inconsistent."""


class UnsupportedFormError(QLVError, ValueError):
    """A covariance matrix is not in the supported standard form."""


class DomainError(QLVError, ArithmeticError):
    """A formula was evaluated outside its domain (non-physical input)."""


class DegenerateScenarioError(QLVError):
    """The two hypotheses coincide or the geometry carries no information."""
