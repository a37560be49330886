"""Exception hierarchy shared by all fragex modules.

Every error carries a stable ``code`` attribute used by the CLI and the
HTTP layer; the code is the class name.
"""


class FragexError(Exception):
    """Base class for all fragex errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class MalformedRecord(FragexError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class DanglingParent(FragexError):
    def __init__(self, hash: str):
        super().__init__(f"parent {hash} not present in snapshot")
        self.hash = hash


class MissingHead(FragexError):
    def __init__(self, head: str):
        super().__init__(f"declared head {head} not present in snapshot")
        self.head = head


class NotARepository(FragexError):
    def __init__(self, path: str):
        super().__init__(f"{path} is not a git repository")
        self.path = path


class GitInvocationFailed(FragexError):
    def __init__(self, exit_status: int, diagnostics: str):
        super().__init__(f"git exited with status {exit_status}: {diagnostics.strip()}")
        self.exit_status = exit_status
        self.diagnostics = diagnostics


class CycleDetected(FragexError):
    pass


class EmptyScope(FragexError):
    pass


class UnknownRelease(FragexError):
    def __init__(self, tag: str):
        super().__init__(f"release tag {tag!r} not found on the stem")
        self.tag = tag


class InvalidArgument(FragexError):
    pass


class PersistenceFailure(FragexError):
    def __init__(self, path: str, cause: BaseException):
        super().__init__(f"failed to persist {path}: {cause}")
        self.path = path
        self.cause = cause
