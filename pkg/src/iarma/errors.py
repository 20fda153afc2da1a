"""Exception hierarchy.

The CLI maps these onto stable exit codes (see ``iarma.cli``): parameter and
time-grid problems are validation errors, degenerate-data and numerical
failures are reported separately from I/O errors.
"""


class IarmaError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(IarmaError, ValueError):
    """A model parameter or option is outside its admissible range."""


class TimeGridError(IarmaError, ValueError):
    """Observation times are unsorted, duplicated, or too closely spaced."""


class DataError(IarmaError, ValueError):
    """The data cannot support the requested computation (e.g. constant series)."""


class NumericalError(IarmaError, ArithmeticError):
    """A computation produced a non-finite or pathological result."""


class FitError(IarmaError, RuntimeError):
    """The optimizer failed at every start point."""
