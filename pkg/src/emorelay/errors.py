"""Exception types shared across the package."""


class EmorelayError(Exception):
    """Base class for all package errors."""

    #: Stable machine-readable code carried on the wire in ERROR frames.
    code = "INTERNAL"


# --- audio ingestion ---

class MalformedContainer(EmorelayError):
    code = "MALFORMED_CONTAINER"


class UnsupportedEncoding(EmorelayError):
    code = "UNSUPPORTED_ENCODING"


class UnsupportedRate(EmorelayError):
    code = "UNSUPPORTED_RATE"


class TooShort(EmorelayError):
    code = "TOO_SHORT"


# --- model weight files ---

class BadMagic(EmorelayError):
    code = "BAD_MAGIC"


class VersionUnsupported(EmorelayError):
    code = "VERSION_UNSUPPORTED"


class DimensionMismatch(EmorelayError):
    code = "DIMENSION_MISMATCH"


class TruncatedFile(EmorelayError):
    code = "TRUNCATED_FILE"


# --- transcription ---

class TranscriptionUnavailable(EmorelayError):
    code = "TRANSCRIPTION_UNAVAILABLE"


# --- teaser catalog ---

class SchemaViolation(EmorelayError):
    code = "SCHEMA_VIOLATION"


class InvariantViolation(EmorelayError):
    code = "INVARIANT_VIOLATION"


class UnknownTeaser(EmorelayError):
    code = "UNKNOWN_TEASER"


# --- relay protocol / sessions ---

class MalformedFrame(EmorelayError):
    code = "MALFORMED_FRAME"


class DuplicateUser(EmorelayError):
    code = "DUPLICATE_USER"


class PeerUnavailable(EmorelayError):
    code = "PEER_UNAVAILABLE"


class AlreadyPaired(EmorelayError):
    code = "ALREADY_PAIRED"


class NotPaired(EmorelayError):
    code = "NOT_PAIRED"


class UploadRejected(EmorelayError):
    code = "UPLOAD_REJECTED"


class UnknownUpload(EmorelayError):
    code = "UNKNOWN_UPLOAD"


class UploadExpired(EmorelayError):
    code = "UPLOAD_EXPIRED"


class UnknownMessage(EmorelayError):
    code = "UNKNOWN_MESSAGE"


class Forbidden(EmorelayError):
    code = "FORBIDDEN"


class UnknownConversation(EmorelayError):
    code = "UNKNOWN_CONVERSATION"


# --- CLI / config ---

class BadConfig(EmorelayError):
    code = "BAD_CONFIG"


class EmptyFixtureSet(EmorelayError):
    code = "EMPTY_FIXTURE_SET"
