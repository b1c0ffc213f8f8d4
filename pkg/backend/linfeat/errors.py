"""Exception hierarchy for linfeat

Each family maps to one CLI exit code (see app.main).
"""


class LinfeatError(Exception):
    """Base class for every error raised by linfeat"""
    exit_code = 1


class ConfigError(LinfeatError, ValueError):
    """Run configuration is invalid"""
    exit_code = 2


class ArgumentError(LinfeatError, ValueError):
    """An operation was called with arguments outside its domain"""
    exit_code = 2


class DataError(LinfeatError):
    """Input data could not be read or failed validation"""
    exit_code = 3


class CsvParseError(DataError):
    """A CSV cell is not a number"""

    def __init__(self, message: str, row: int, col: int):
        super().__init__(message)
        self.row = row
        self.col = col


class ValidationError(DataError, ValueError):
    """Parsed data violates a dataset invariant"""


class NumericError(LinfeatError, ArithmeticError):
    """A numerical stage failed"""
    exit_code = 4


class FeatureEvaluationError(NumericError):
    """A compressing feature produced a non-finite value"""


class DegenerateFeatureError(NumericError):
    """Linearized feature is constant over the samples"""


class DegenerateDeflationError(NumericError):
    """PLS deflation exhausted the data before the requested component"""
