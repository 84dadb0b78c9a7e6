"""Exception types shared across the package."""


class AnalysisError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(AnalysisError, ValueError):
    """Input data or configuration failed a validation check."""


class DegenerateColumnError(ValidationError):
    """An algorithm column carries no information (zero variance)."""


class FitError(AnalysisError, RuntimeError):
    """Model fitting failed for numerical reasons."""
