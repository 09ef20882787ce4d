"""
Categories of compilation and execution errors of generated tests
"""
from dataclasses import dataclass
from enum import Enum
import re

from llmTestGen.diagnostics.emParser import Diagnostic


class ErrorKind(Enum):
    SymbolResolution = "SymbolResolution"
    Type = "Type"
    Access = "Access"
    AbstractInstantiation = "AbstractInstantiation"
    UnsupportedOperator = "UnsupportedOperator"
    OtherCompile = "OtherCompile"
    Assertion = "Assertion"
    Runtime = "Runtime"


@dataclass(frozen=True)
class ErrorCategory():
    """
    :ivar ~.detail: finer label inside of the kind,
        e.g. "Cannot find symbol method" or the exception type
    """
    kind: ErrorKind
    detail: str

    def __post_init__(self):
        assert isinstance(self.kind, ErrorKind), self.kind

    @property
    def key(self) -> str:
        return f"{self.kind.value:s}/{self.detail:s}"

    @classmethod
    def from_key(cls, key: str) -> "ErrorCategory":
        kind, detail = key.split("/", 1)
        return cls(ErrorKind(kind), detail)

    # ordering of Enum members is not defined
    def __lt__(self, other):
        return (self.kind.value, self.detail) < (other.kind.value, other.detail)


# (pattern on error_type, kind, detail), the first match wins
_COMPILE_RULES = [
    (re.compile(r"^cannot find symbol"), ErrorKind.SymbolResolution, None),
    (re.compile(r"^package \S+ does not exist"), ErrorKind.SymbolResolution,
     "Package does not exist"),
    (re.compile(r"^incompatible types"), ErrorKind.Type, "Incompatible types"),
    (re.compile(r"^bad operand types? for"), ErrorKind.Type, "Bad operand types"),
    (re.compile(r"^constructor \S+ in (class|enum) \S+ cannot be applied to given types"),
     ErrorKind.Type, "Constructor cannot be applied to given types"),
    (re.compile(r"^no suitable constructor found"),
     ErrorKind.Type, "Constructor cannot be applied to given types"),
    (re.compile(r"^method \S+ in (class|interface|enum) \S+ cannot be applied to given types"),
     ErrorKind.Type, "Methods cannot be applied to given types"),
    (re.compile(r"^no suitable method found"),
     ErrorKind.Type, "Methods cannot be applied to given types"),
    (re.compile(r"^reference to \S+ is ambiguous"), ErrorKind.Type, "Ambiguous reference"),
    (re.compile(r"has private access in"), ErrorKind.Access, "Private access"),
    (re.compile(r"has protected access in"), ErrorKind.Access, "Protected access"),
    (re.compile(r"is not public in .* cannot be accessed from outside package"),
     ErrorKind.Access, "Package access"),
    (re.compile(r"is abstract; cannot be instantiated"),
     ErrorKind.AbstractInstantiation, "Abstract class cannot be instantiated"),
    (re.compile(r"diamond operator is not supported"),
     ErrorKind.UnsupportedOperator, "Diamond operator is not supported"),
    (re.compile(r"(lambda expressions|method references|try-with-resources) (are|is) not supported"),
     ErrorKind.UnsupportedOperator, "Operator is not supported"),
    (re.compile(r"^unreported exception"), ErrorKind.OtherCompile, "Unreported exception"),
]

_SYMBOL_DETAIL = {
    "class": "Cannot find symbol class",
    "interface": "Cannot find symbol class",
    "enum": "Cannot find symbol class",
    "method": "Cannot find symbol method",
    "constructor": "Cannot find symbol method",
    "variable": "Cannot find symbol variable",
    "package": "Package does not exist",
}

# exception families which mean that an assertion of the test failed
ASSERTION_EXCEPTIONS = frozenset([
    "java.lang.AssertionError",
    "org.opentest4j.AssertionFailedError",
    "org.junit.ComparisonFailure",
    "org.junit.internal.ArrayComparisonFailure",
    "junit.framework.AssertionFailedError",
    "junit.framework.ComparisonFailure",
])


def categorize_compile(d: Diagnostic) -> ErrorCategory:
    """
    Map the error type of a compiler diagnostic on the category of the error
    (total, unknown errors are OtherCompile)
    """
    t = d.error_type.strip()
    for pattern, kind, detail in _COMPILE_RULES:
        if pattern.search(t):
            if detail is None:
                detail = _SYMBOL_DETAIL.get(d.symbol_kind, "Cannot find symbol")
            return ErrorCategory(kind, detail)
    return ErrorCategory(ErrorKind.OtherCompile, t.split(":", 1)[0] or "unknown")


def categorize_runtime(f: "RuntimeFailure") -> ErrorCategory:
    t = f.exception_type
    if t in ASSERTION_EXCEPTIONS:
        return ErrorCategory(ErrorKind.Assertion, t)
    return ErrorCategory(ErrorKind.Runtime, t)
