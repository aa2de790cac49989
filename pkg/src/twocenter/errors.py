"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Non-finite, mis-shaped, or invariant-violating input."""


class WrongBranchError(ValueError):
    """Ellipsoid point on (or numerically indistinguishable from) the W <= 0 sheet."""


class UnsupportedParameterError(ValueError):
    """Operation only defined for a restricted parameter range (typically a = 1)."""


class NearCollisionError(RuntimeError):
    """Evaluation requested closer to an attracting center than the guard distance."""


class CenterRayError(ValueError):
    """Ellipsoid point on the projection ray of an attracting center."""


class RankDeficientError(RuntimeError):
    """Least-squares sample set remained rank deficient after resampling."""
