"""Exception types shared across the package."""


class PanelIvError(Exception):
    """Base class for all errors raised by this package."""


class DataError(PanelIvError):
    """Raised for malformed or inconsistent input data (CSV files, panels)."""


class SpecificationError(PanelIvError):
    """Raised for invalid regression specs, filters, or transforms."""


class EstimationError(PanelIvError):
    """Raised when an estimation cannot be carried out."""


class CollinearityError(EstimationError):
    """Raised when the design matrix is rank deficient.

    ``columns`` names the offending column set.
    """

    def __init__(self, columns, message=None):
        self.columns = list(columns)
        super().__init__(message or f"collinear columns: {', '.join(self.columns)}")


class UntabulatedError(PanelIvError):
    """Raised when a critical-value lookup falls outside the shipped table."""


class ConfigError(PanelIvError):
    """Raised for unreadable or invalid run configuration files."""
