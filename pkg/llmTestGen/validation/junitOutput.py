"""
Failures reported by JUnit runners

JUnitCore (JUnit 4)::

    There was 1 failure:
    1) testSetCharAt(org.example.text.StrBuilderGeneratedTest)
    org.junit.ComparisonFailure: expected:<[J]ava> but was:<[j]ava>
        at org.junit.Assert.assertEquals(Assert.java:117)
        at org.example.text.StrBuilderGeneratedTest.testSetCharAt(StrBuilderGeneratedTest.java:14)

console launcher (JUnit 5)::

    Failures (1):
      JUnit Jupiter:StrBuilderGeneratedTest:testSetCharAt()
        MethodSource [className = 'org.example.text.StrBuilderGeneratedTest', ...]
        => org.opentest4j.AssertionFailedError: expected: <Java> but was: <java>
           org.example.text.StrBuilderGeneratedTest.testSetCharAt(StrBuilderGeneratedTest.java:14)
"""
from dataclasses import dataclass
import re
from typing import Optional

# exception type used for tests killed after the execution timeout
EXECUTION_TIMEOUT = "org.junit.runners.model.TestTimedOutException"

_FAILURE_SECTION = re.compile(
    r"^(There (was|were) \d+ failures?:|Failures \(\d+\):|Exception in thread )", re.MULTILINE)
_EXCEPTION = re.compile(
    r"^\s*(=>\s*)?(Caused by:\s*)?"
    r"(?P<type>(?:[a-z_$][\w$]*\.)+[A-Z][\w$]*(?:\$[\w$]+)*)"
    r"(?::\s?(?P<msg>.*))?$")
_UNCAUGHT = re.compile(r"^Exception in thread \"[^\"]*\" (?P<type>[\w$.]+)(?::\s?(?P<msg>.*))?$",
                       re.MULTILINE)


@dataclass(frozen=True)
class RuntimeFailure():
    """
    The first failure of the test execution

    :ivar ~.exception_type: fully qualified name of the exception
    :ivar ~.failing_line: line in the test file where the exception was thrown
    """
    exception_type: str
    message: str = ""
    failing_line: Optional[int] = None

    def __post_init__(self):
        assert self.exception_type, self

    def to_record(self) -> dict:
        return {
            "exception_type": self.exception_type,
            "message": self.message,
            "failing_line": self.failing_line,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "RuntimeFailure":
        return cls(rec["exception_type"], rec.get("message", ""), rec.get("failing_line"))


def timeout_failure(timeout: float) -> RuntimeFailure:
    return RuntimeFailure(EXECUTION_TIMEOUT, f"test timed out after {timeout:g} s")


def parse_runtime_failure(output: str, test_class: str) -> Optional[RuntimeFailure]:
    """
    :param test_class: fully qualified name of the executed test class
    :return: the first failure reported by the runner, None if there is none
    """
    text = output.replace("\r\n", "\n")
    m = _UNCAUGHT.search(text)
    if m is not None:
        return RuntimeFailure(m.group("type"), (m.group("msg") or "").strip())

    sec = _FAILURE_SECTION.search(text)
    if sec is None:
        return None

    lines = text[sec.end():].split("\n")
    exc_i = None
    exc = None
    for i, ln in enumerate(lines):
        if ln.lstrip().startswith("at ") or "MethodSource [" in ln:
            continue
        m = _EXCEPTION.match(ln)
        if m is not None:
            exc_i, exc = i, m
            break
    if exc is None:
        return None

    frame = re.compile(r"(?:at\s+)?" + re.escape(test_class) +
                       r"\.[\w$<>]+\([\w$]+\.java:(?P<line>\d+)\)")
    failing_line = None
    for ln in lines[exc_i + 1:]:
        f = frame.search(ln)
        if f is not None:
            failing_line = int(f.group("line"))
            break
        if _EXCEPTION.match(ln) and not ln.lstrip().startswith("Caused by"):
            # frames of the next failure
            break
    return RuntimeFailure(exc.group("type"), (exc.group("msg") or "").strip(), failing_line)
