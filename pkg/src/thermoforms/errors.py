"""Exception hierarchy shared across the package."""


class ThermoformsError(Exception):
    """Base class for all package errors."""


class UnknownSymbol(ThermoformsError, KeyError):
    pass


class NotClosed(ThermoformsError):
    """Raised when a potential is requested for a form whose exterior derivative is nonzero."""


class NotIntegrable(ThermoformsError):
    """A closed form whose antiderivative falls outside the Potential grammar."""


class FormSyntaxError(ThermoformsError, ValueError):
    pass


class DomainError(ThermoformsError, ValueError):
    """Nonpositive pressure or volume."""


class InconsistentKind(ThermoformsError, ValueError):
    """Segment kind does not match its endpoints (e.g. isochoric with V changing)."""


class ParseError(ThermoformsError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ThermoformsError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonFinite(ThermoformsError, ArithmeticError):
    pass
