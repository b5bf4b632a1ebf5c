"""Exception hierarchy shared by all feedlab engines.

Every error carries a short machine-readable ``code`` so the wire protocol
can map failures to structured ``error`` messages instead of dropping the
connection.
"""


class FeedlabError(Exception):
    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ValidationError(FeedlabError):
    """A domain value violated an invariant; ``field`` names the offender."""

    code = "validation"

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class SequenceError(FeedlabError):
    code = "sequence"


class UnknownReferenceError(FeedlabError):
    code = "unknown_reference"


class ConfigurationError(FeedlabError):
    code = "configuration"


class UnknownRoomError(FeedlabError):
    code = "unknown_room"


class DuplicateTeacherError(FeedlabError):
    code = "duplicate_teacher"


class PairingError(FeedlabError):
    code = "pairing"


class RoleError(FeedlabError):
    code = "role"


class ModeError(FeedlabError):
    code = "mode"


class GameError(FeedlabError):
    code = "game"


class ParseError(FeedlabError):
    code = "parse"


class InputError(FeedlabError):
    code = "input"


class DegenerateDataError(FeedlabError):
    """Statistic undefined for this input (zero variance, empty expected cell)."""

    code = "degenerate_data"
