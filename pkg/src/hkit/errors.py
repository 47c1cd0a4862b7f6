"""Exception hierarchy shared by every hkit module."""


class HkitError(Exception):
    """Base class for all errors raised by hkit."""


class DimensionMismatch(HkitError, ValueError):
    pass


class TruncationMismatch(HkitError, ValueError):
    """Two jets with different truncation degrees were combined."""


class ZeroSeries(HkitError, ValueError):
    pass


class ZeroDivisor(HkitError, ValueError):
    pass


class NonzeroConstantTerm(HkitError, ValueError):
    pass


class InsufficientTruncation(HkitError, ValueError):
    """The requested quantity cannot be certified at the given truncation degree."""


class FibreMismatch(HkitError, ValueError):
    pass


class NoStabilization(HkitError):
    """The projected relation spaces were still shrinking at the end of the window."""


class SchemaError(HkitError, ValueError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
