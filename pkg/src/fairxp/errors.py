"""Exception hierarchy shared by the library and the command line.

Each class carries the process exit code the CLI reports for it.
"""


class AuditError(Exception):
    exit_code = 1


class InputError(AuditError, ValueError):
    """Malformed file, unknown feature, or a value that fails validation."""

    exit_code = 2


class DomainError(AuditError):
    """A precondition on the audited objects does not hold (e.g. an unreal individual)."""

    exit_code = 3


class CapExceeded(AuditError):
    """The feature count is above the enumeration cap."""

    exit_code = 4
