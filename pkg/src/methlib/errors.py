"""Exception hierarchy shared by the engine, the CLI, and the HTTP service.

Every error carries a stable machine code so front ends can map failures
without parsing messages.
"""

from __future__ import annotations


class MethLibError(Exception):
    """Base class; ``code`` is a stable machine-readable identifier."""

    code = "error"

    def __init__(self, message: str, *, position: int | None = None):
        super().__init__(message)
        self.message = message
        self.position = position

    def to_dict(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.position is not None:
            out["position"] = self.position
        return out


class UnknownIdError(MethLibError):
    code = "unknown_id"


class EmptyNameError(MethLibError):
    code = "empty_name"


class UnknownPropertyError(MethLibError):
    code = "unknown_property"


class UnknownFactorError(MethLibError):
    code = "unknown_factor"


class OutOfDomainError(MethLibError):
    code = "out_of_domain"


class SelfLoopError(MethLibError):
    code = "self_loop"


class DuplicateRelationError(MethLibError):
    code = "duplicate_relation"


class InvalidLibraryError(MethLibError):
    code = "invalid_library"

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class DeleteBlockedError(MethLibError):
    code = "delete_blocked"


class DslSyntaxError(MethLibError):
    code = "syntax_error"


class TreeDefinitionError(MethLibError):
    code = "bad_tree"


class WalkStateError(MethLibError):
    code = "bad_walk_state"


class BadAnswerError(MethLibError):
    code = "bad_answer"


class ScreeningRequiredError(MethLibError):
    code = "screening_required"


class MissingAnswerError(MethLibError):
    code = "missing_answer"


class StoreFormatError(MethLibError):
    code = "malformed_file"


class UnsupportedVersionError(MethLibError):
    code = "unsupported_version"
