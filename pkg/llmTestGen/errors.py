from typing import Optional


class LlmTestGenError(Exception):
    """
    Base class of all errors raised by this library
    """
    pass


class ProjectError(LlmTestGenError):
    """
    The project tree is unreadable or the project description is invalid
    """
    pass


class JavaSyntaxError(LlmTestGenError):
    """
    Source text which does not parse as Java

    :ivar ~.diagnostic: message of the parser
    :ivar ~.line: line where the parser failed if known
    """

    def __init__(self, diagnostic: str, line: Optional[int]=None):
        super(JavaSyntaxError, self).__init__(diagnostic, line)
        self.diagnostic = diagnostic
        self.line = line

    def __str__(self):
        if self.line is None:
            return self.diagnostic
        return f"{self.diagnostic:s} (line {self.line:d})"


class ExtractionError(JavaSyntaxError):
    """
    The focal context could not be extracted from the focal file
    """
    pass


class PreconditionError(LlmTestGenError, ValueError):
    """
    Arguments of an operation violate its contract
    """
    pass


class LlmError(LlmTestGenError):
    pass


class CassetteMissError(LlmError):
    """
    The request was not recorded in the cassette used for replay
    """

    def __init__(self, request_hash: str):
        super(CassetteMissError, self).__init__(
            f"request {request_hash:s} is not recorded in the cassette")
        self.request_hash = request_hash


class LlmTransportError(LlmError):
    """
    The chat-completion endpoint failed even after retries
    """
    pass


class NoCodeError(LlmError):
    """
    The response does not contain anything which parses as Java code
    """
    pass


class ToolchainError(LlmTestGenError):
    pass


class ToolchainNotFoundError(ToolchainError):
    """
    The compiler, build tool or java launcher is not installed
    """
    pass


class ConfigError(LlmTestGenError):
    pass


class ReportError(LlmTestGenError):
    pass


class EmptyInputError(ReportError):
    pass


class SchemaMismatchError(ReportError):
    pass
