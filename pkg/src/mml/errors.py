"""Exception hierarchy shared by all modules."""


class MMLError(Exception):
    """Base class for every error raised by the package."""


class DomainError(MMLError, ValueError):
    """A function was evaluated outside its domain (log of 0, negative power of a singular matrix)."""


class ConditioningError(MMLError, ValueError):
    """Input condition number exceeds the guard."""


class ConvergenceFailure(MMLError, RuntimeError):
    pass


class SizeError(MMLError, ValueError):
    pass


class SpecError(MMLError, ValueError):
    """Mean parameters are invalid or unsuitable for the requested check."""


class CatalogError(MMLError, ValueError):
    pass


class RangeError(MMLError, ValueError):
    pass


class DegenerateError(MMLError, ValueError):
    pass


class IoError(MMLError, OSError):
    """A report or campaign result could not be written or read."""
