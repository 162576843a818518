"""Exception types raised by validation and solver code."""


class SwiptError(Exception):
    """Base class for all package-specific errors."""


class EvenNError(SwiptError):
    """Subcarrier count must be odd (the closed-form power model requires it)."""


class BadLengthError(SwiptError):
    """Tap/coefficient vector length inconsistent with the subcarrier count."""


class NonPositiveBandwidthError(SwiptError):
    """Bandwidth must be strictly positive."""


class WindowTooSmallError(SwiptError):
    """Half-sample interpolation window must cover at least one block."""


class NegativeVarianceError(SwiptError):
    """Second moments must dominate squared means (P >= mu^2 per component)."""


class DimensionMismatchError(SwiptError):
    """Inputs, channel and coefficient tensors must share the same N."""


class NonZeroMeanError(SwiptError):
    """Operation requires a zero-mean input."""


class InfeasibleStartError(SwiptError):
    """Warm start violates the feasibility constraints."""


class ConfigError(SwiptError):
    """Run configuration is missing or malformed."""
