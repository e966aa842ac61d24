"""Exception hierarchy shared by the codecs, container and CLI."""


class RagcError(Exception):
    """Base class for all errors raised by this package."""


class CorruptStreamError(RagcError):
    """A bit stream or container could not be parsed."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at bit {position})"
        super().__init__(message)
        self.position = position


class UnsupportedError(RagcError):
    """An encoding was asked to handle a grammar shape it cannot represent."""


class UsageError(RagcError):
    """Invalid combination of user-facing options."""


class InvariantError(RagcError):
    """Internal consistency check failed; indicates a bug, not bad input."""
