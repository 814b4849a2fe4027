"""Exception hierarchy shared by all modules."""


class HardyError(Exception):
    """Base class; ``code`` is the machine-readable tag printed by the CLI."""

    code = "ERROR"


class ParameterDomainError(HardyError, ValueError):
    code = "PARAM"


class OutsideDomainError(HardyError, ValueError):
    code = "OUTSIDE"


class GeometryError(HardyError, ValueError):
    code = "GEOMETRY"


class CoverageError(HardyError):
    """Raised when a covering cannot reach every sample point."""

    code = "COVERAGE"

    def __init__(self, message, uncovered=None):
        super().__init__(message)
        self.uncovered = uncovered


class DegenerateGridError(HardyError, ValueError):
    code = "GRID"


class ZeroDenominatorError(HardyError, ZeroDivisionError):
    code = "ZERO_DENOMINATOR"


class NumericalError(HardyError, ArithmeticError):
    code = "NUMERIC"


class ConfigError(HardyError, ValueError):
    code = "CONFIG"
