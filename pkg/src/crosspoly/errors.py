"""Exception hierarchy shared by every module.

The CLI maps ``ValidationError`` subclasses to exit status 2 and
``PrecisionError`` to exit status 3.
"""


class CrossPolyError(Exception):
    """Base class; ``module`` tags where the failure originated."""

    module = "crosspoly"

    def __init__(self, message, module=None, **details):
        super().__init__(message)
        if module is not None:
            self.module = module
        self.details = details


class ValidationError(CrossPolyError):
    pass


class ConfigurationError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class DegenerateWeightError(ValidationError):
    pass


class SingularPointError(ValidationError):
    """Evaluation requested at a branch point or other singular location."""


class AmbiguousTraceError(ValidationError):
    """A point on the cut was passed where a side must be chosen."""


class ProximityError(ValidationError):
    pass


class ExcludedIndexError(ValidationError):
    pass


class UnsupportedRegimeError(ValidationError):
    pass


class PoleError(ValidationError):
    pass


class GeometryError(CrossPolyError):
    pass


class PrecisionError(CrossPolyError):
    """Numerical procedure could not reach the requested accuracy."""
