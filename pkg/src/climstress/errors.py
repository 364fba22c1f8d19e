"""Exception hierarchy and the frozen CLI exit-code map."""


class ClimstressError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class IngestError(ClimstressError):
    """Raised when SSP export files cannot be parsed or normalised."""

    exit_code = 2


class UnitError(IngestError):
    """Unknown or inconvertible unit in an input file."""


class PriceBaseError(IngestError):
    """Invalid price-base conversion (e.g. double conversion)."""


class CalibrationError(ClimstressError):
    """Fixed-point TFP calibration failed to converge."""

    exit_code = 3

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class ExtrapolationError(CalibrationError):
    """Series cannot be extended past the data horizon."""


class SolverError(ClimstressError):
    """Welfare optimisation failed (line search collapse, max evals)."""

    exit_code = 4

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NumericError(ClimstressError):
    """Numerical failure outside the solver (quadrature, pulse, ...)."""

    exit_code = 5


class DomainError(NumericError):
    """Input outside the mathematical domain of an operation."""


class PulseError(NumericError):
    """Emission pulse destabilised the re-simulation; try a smaller pulse."""


class RangeError(NumericError):
    """Requested point lies outside the covered grid."""


class ConfigError(ClimstressError):
    """Invalid run configuration or missing config key."""

    exit_code = 64
