"""Exception hierarchy.

Every error carries a short machine-readable ``code`` and the process exit
status the CLI uses for it (2 verification failure, 3 precondition, 4 input
parse).
"""

from __future__ import annotations


class WildMFError(Exception):
    code = "ERROR"
    exit_code = 1

    def __init__(self, message: str, *, witness=None):
        super().__init__(message)
        self.witness = witness


class ConfigurationError(WildMFError, ValueError):
    """Operands live in incompatible rings or have incompatible shapes."""

    code = "CONFIGURATION"
    exit_code = 3


class TruncationError(WildMFError, ValueError):
    """A coefficient at or beyond the truncation degree was requested."""

    code = "TRUNCATED"
    exit_code = 3


class PreconditionError(WildMFError, ValueError):
    code = "PRECONDITION"
    exit_code = 3


class OrderTooLowError(PreconditionError):
    code = "ORDER_TOO_LOW"


class EmptyInputError(PreconditionError):
    code = "EMPTY_INPUT"


class NonCommutingError(PreconditionError):
    code = "NONCOMMUTING"


class ArityMismatchError(PreconditionError):
    code = "ARITY_MISMATCH"


class DistinctnessError(PreconditionError):
    code = "NOT_DISTINCT"


class FieldTooSmallError(PreconditionError):
    code = "FIELD_TOO_SMALL"


class VariableClashError(PreconditionError):
    code = "VARIABLE_CLASH"


class InvalidHomError(PreconditionError):
    code = "INVALID_HOM"


class CertificationError(WildMFError):
    code = "CERTIFICATION_FAILED"
    exit_code = 2


class ParseError(WildMFError, ValueError):
    code = "PARSE_ERROR"
    exit_code = 4
