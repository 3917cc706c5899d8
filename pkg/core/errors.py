class UniqcubeError(Exception):
    """Base class for errors raised by uniqcube."""


class DimensionError(UniqcubeError, ValueError):
    """A dimension is out of range or two objects disagree on k."""


class InputFormatError(UniqcubeError, ValueError):
    """Malformed vertex, subcube, level or sample text."""


class BudgetExceeded(UniqcubeError):
    """A configured search budget ran out before an answer was certified."""
