"""Exception types shared across the package."""


class BooleBellError(Exception):
    """Base class for all errors raised by this package."""


class DuplicateEvent(BooleBellError):
    pass


class UnknownEventInMonomial(BooleBellError):
    pass


class DuplicateMonomial(BooleBellError):
    pass


class ScenarioTooLarge(BooleBellError):
    """Vertex enumeration would exceed the configured 2**n limit."""


class DimensionMismatch(BooleBellError):
    pass


class EmptyInput(BooleBellError):
    pass


class ZeroInequality(BooleBellError):
    """All coefficients are zero; not a valid inequality."""


class ResourceExhausted(BooleBellError):
    """Intermediate ray count exceeded the configured cap."""


class MissingCompanionMonomial(BooleBellError):
    """The basis is not closed under the requested complementation."""


class BasisNotClosed(BooleBellError):
    """A permutation does not map the monomial basis onto itself."""


class UnsupportedMonomial(BooleBellError):
    """The probability model does not define this monomial."""


class MissingProbability(BooleBellError):
    """An assignment lacks a monomial with a nonzero coefficient."""


class FormatError(BooleBellError):
    """Malformed scenario, inequality, or point file."""
