"""Exception hierarchy for the zlink toolkit.

Everything raised on purpose by this package derives from ZlinkError, so
callers can catch one base class at API boundaries.  Schema problems,
buffer codec problems and transport problems form separate sub-trees.
"""

from __future__ import annotations


class ZlinkError(Exception):
    """Base class for all zlink errors."""


# --- schema compiler ---------------------------------------------------


class SchemaError(ZlinkError):
    """Base class for schema parsing and validation errors."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(message)
        self.line = line
        self.col = col

    def __str__(self) -> str:
        msg = super().__str__()
        if self.line:
            return f"{self.line}:{self.col}: {msg}"
        return msg


class SchemaSyntaxError(SchemaError):
    """Token-level parse failure; carries position and the expected token."""

    def __init__(self, message: str, line: int, col: int, expected: str = ""):
        super().__init__(message, line, col)
        self.expected = expected


class UnknownType(SchemaError):
    """A field references a type name that is neither scalar nor declared."""


class DuplicateName(SchemaError):
    """Duplicate type name in a document or field name in a type."""


class VectorOfDynamic(SchemaError):
    """Vector or fixed-array element kind is not static-sized."""


class CyclicNesting(SchemaError):
    """A type contains itself directly or transitively."""


# --- object buffer -----------------------------------------------------


class NoSuchField(ZlinkError):
    """Field path does not resolve within the type."""


class KindMismatch(ZlinkError):
    """Value does not match the declared field kind."""


class LengthMismatch(KindMismatch):
    """Fixed-size array written with the wrong element count."""


class IntegerRange(KindMismatch):
    """Integer value outside the representable range of the field."""


class Utf8Error(ZlinkError):
    """String value cannot be encoded to, or decoded from, UTF-8."""


class UnknownKey(ZlinkError):
    """JSON object carries a key that is not a field of the type."""


class JsonSyntax(ZlinkError):
    """Input is not well-formed JSON."""


class DecodeError(ZlinkError):
    """Base class for binary decoding failures."""


class TooShort(DecodeError):
    """Buffer shorter than the static section of the type."""


class SlotOutOfBounds(DecodeError):
    """A dynamic-field slot points outside the buffer."""


class Misaligned(DecodeError):
    """Vector payload length is not a multiple of the element size."""


# --- messaging ---------------------------------------------------------


class InvalidUri(ZlinkError):
    """URI text does not parse as tcp://host[:port]."""


class BindFailed(ZlinkError):
    """Could not bind the requested address."""


class DuplicateSubscription(ZlinkError):
    """A handler is already installed for this digest."""


class DuplicateEndpoint(ZlinkError):
    """An object of this type is already registered on the server."""
