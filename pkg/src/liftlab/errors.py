"""Error taxonomy shared by every module; the CLI maps these to exit codes."""


class LiftlabError(Exception):
    exit_code = 1


class InputError(LiftlabError, ValueError):
    """Malformed or inconsistent input (exit code 2)."""

    exit_code = 2


class DomainError(LiftlabError, ValueError):
    """Input is well formed but violates a mathematical precondition (exit code 2)."""

    exit_code = 2


class ResourceError(LiftlabError):
    """A configured size cap would be exceeded (exit code 3)."""

    exit_code = 3


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else "line %d: %s" % (line, message))
