"""Exception hierarchy shared by all apholo modules."""


class ApholoError(Exception):
    """Base class for every error raised by apholo."""


class NonConverged(ApholoError):
    """A truncated limit or quadrature did not meet its tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SizeLimit(ApholoError):
    pass


class Unrepresentable(ApholoError):
    pass


class OutOfDomain(ApholoError):
    pass


class GridTooCoarse(ApholoError):
    pass


class PoleAt(ApholoError):
    pass


class LogOfZero(ApholoError):
    pass


class OverlappingBlends(ApholoError):
    pass


class ProfileMismatch(ApholoError):
    pass


class AtSingularPoint(ApholoError):
    pass


class VerificationFailed(ApholoError):
    """No trial arc passed; ``report`` carries the best sup error reached."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotHolomorphic(ApholoError):
    pass


class CoverMismatch(ApholoError):
    pass


class QuadratureFailure(ApholoError):
    pass


class GlueMismatch(ApholoError):
    pass


class StageError(ApholoError):
    """Wraps an error raised inside one pipeline stage."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
