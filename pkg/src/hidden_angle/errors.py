"""Exception types raised by the toolkit."""


class HiddenAngleError(Exception):
    """Base class for all toolkit errors."""


class InvalidQuantumNumber(HiddenAngleError):
    """Quantum number outside the valid range for the state family."""


class NonPositiveParameter(HiddenAngleError):
    """A physical parameter (mass, frequency, width, spread) must be > 0."""


class UnnormalizableTable(HiddenAngleError):
    """Tabulated amplitudes cannot be normalized (zero norm or non-finite)."""


class NoClosedForm(HiddenAngleError):
    """The state family has no closed-form variance expressions."""


class QuadratureNotConverged(HiddenAngleError):
    """Adaptive integration exceeded its evaluation budget."""


class DerivativeUnstable(HiddenAngleError):
    """Tabulated grid too coarse to differentiate reliably."""


class RejectionInefficient(HiddenAngleError):
    """Rejection sampler acceptance rate fell below the usable threshold."""


class DegenerateVector(HiddenAngleError):
    """A vector with zero norm where a direction is required."""


class OutOfDomain(HiddenAngleError):
    """Numeric argument outside the mathematical domain of the operation."""


class TooFewEvents(HiddenAngleError):
    """Sample statistics need at least two event records."""


class ConflictingCalibration(HiddenAngleError):
    """More than one velocity-calibration mode was specified."""


class EventParseError(HiddenAngleError):
    """Base class for event-stream ingestion failures."""


class MissingHeader(EventParseError):
    """CSV input does not start with the expected `E,px,py,pz` header."""


class MalformedRow(EventParseError):
    """A data row could not be parsed; carries the 1-based line number."""

    def __init__(self, line_number, message):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class NonFiniteValue(EventParseError):
    """An event field parsed to NaN or infinity; carries the line number."""

    def __init__(self, line_number, message):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number
