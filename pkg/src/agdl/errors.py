"""Exception types raised by the codec."""


class AgdlError(Exception):
    """Base class for all codec errors."""


class InvalidParameterError(AgdlError, ValueError):
    pass


class MalformedPayloadError(AgdlError, ValueError):
    """A byte stream could not be parsed.

    ``offset`` is the byte position at which parsing failed, when known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class RankFailureError(AgdlError, ArithmeticError):
    pass


class IntegrityError(AgdlError):
    pass
