"""
Parser of compiler error messages

Understands the plain javac format::

    src/main/java/org/example/FooGeneratedTest.java:12: error: cannot find symbol
            xml.addAttribute("id", "1");
               ^
      symbol:   method addAttribute(String,String)
      location: variable xml of type Xml
    1 error

and the same records as printed by maven::

    [ERROR] /ws/src/main/java/org/example/FooGeneratedTest.java:[12,12] cannot find symbol
    [ERROR]   symbol:   method addAttribute(String,String)
"""
from dataclasses import dataclass
from pathlib import Path, PurePath
import re
from typing import List, Optional

UNPARSED = "unparsed"

_JAVAC_HEADER = re.compile(
    r"^(?P<file>.+?\.java):(?P<line>\d+):\s*(?P<severity>error|warning):\s*(?P<msg>.*)$")
_MAVEN_HEADER = re.compile(
    r"^\[(?P<severity>ERROR|WARNING)\]\s+(?P<file>.+?\.java):\[(?P<line>\d+),(?P<col>\d+)\]\s*(?P<msg>.*)$")
_MAVEN_PREFIX = re.compile(r"^\[(ERROR|WARNING|INFO)\] ?")
_SYMBOL = re.compile(r"^\s*symbol\s*:\s*(?P<value>.*)$")
_LOCATION = re.compile(r"^\s*location\s*:\s*(?P<value>.*)$")
_SUMMARY = re.compile(r"^\d+ (errors?|warnings?)$")
_SYMBOL_KINDS = ("class", "method", "variable", "constructor", "package",
                 "interface", "enum")


@dataclass(frozen=True)
class Diagnostic():
    """
    One compiler error record

    :ivar ~.error_type: the high level description of the error
        (first line of the message, e.g. "cannot find symbol")
    :ivar ~.file: file the compiler reported
    :ivar ~.line: 1-based line in the file (0 if unknown)
    :ivar ~.symbol: the unresolved symbol if reported
    :ivar ~.symbol_kind: "class", "method", "variable", ... if reported
    :ivar ~.location: the location line of the record
        (e.g. "variable xml of type Xml")
    :ivar ~.raw: text of the whole record
    :ivar ~.in_test_file: False for records about other files than the test
    """
    error_type: str
    file: PurePath
    line: int
    raw: str
    symbol: Optional[str] = None
    symbol_kind: Optional[str] = None
    location: Optional[str] = None
    column: Optional[int] = None
    in_test_file: bool = True

    @property
    def description(self) -> str:
        """
        Error type with the symbol, e.g. "cannot find symbol method addAttribute"
        """
        if self.symbol is None:
            return self.error_type
        elif self.symbol_kind is None:
            return f"{self.error_type:s} {self.symbol:s}"
        return f"{self.error_type:s} {self.symbol_kind:s} {self.symbol:s}"

    def to_record(self) -> dict:
        return {
            "error_type": self.error_type,
            "file": self.file.as_posix(),
            "line": self.line,
            "column": self.column,
            "symbol": self.symbol,
            "symbol_kind": self.symbol_kind,
            "location": self.location,
            "in_test_file": self.in_test_file,
            "raw": self.raw,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Diagnostic":
        return cls(
            error_type=rec["error_type"],
            file=PurePath(rec["file"]),
            line=rec["line"],
            raw=rec["raw"],
            symbol=rec.get("symbol"),
            symbol_kind=rec.get("symbol_kind"),
            location=rec.get("location"),
            column=rec.get("column"),
            in_test_file=rec.get("in_test_file", True),
        )


def same_file(a: PurePath, b: PurePath) -> bool:
    a = PurePath(a).as_posix()
    b = PurePath(b).as_posix()
    if a == b:
        return True
    elif PurePath(a).name != PurePath(b).name:
        return False
    return a.endswith("/" + b) or b.endswith("/" + a)


def parse_symbol(value: str):
    """
    "method addAttribute(String,String)" -> ("method", "addAttribute")
    """
    value = value.strip()
    kind = None
    parts = value.split(None, 1)
    if len(parts) == 2 and parts[0] in _SYMBOL_KINDS:
        kind, value = parts
    elif len(parts) == 2 and parts[0] == "static":
        value = parts[1]
        kind = "method" if "(" in value else "variable"
    name = value.split("(", 1)[0].strip()
    return kind, name or None


class _Record():

    def __init__(self, m, column: Optional[int]):
        self.header = m
        self.column = column
        self.lines = []
        self.severity = m.group("severity").lower()


def parse_diagnostics(raw_output: str, test_file: PurePath) -> List[Diagnostic]:
    """
    Parse the output of the compiler into error records

    :note: warnings are ignored, records about other files than the test file
        are kept with in_test_file=False, repeated records are collapsed
    :return: one Diagnostic per error record in the order of the output,
        a single "unparsed" Diagnostic if the output reports an error
        in an unknown format
    """
    text = raw_output.replace("\r\n", "\n")
    records = []  # type: List[_Record]
    cur = None  # type: Optional[_Record]
    for ln in text.split("\n"):
        m = _JAVAC_HEADER.match(ln)
        col = None
        if m is None:
            m = _MAVEN_HEADER.match(ln)
            if m is not None:
                col = int(m.group("col"))
        if m is not None:
            cur = _Record(m, col)
            records.append(cur)
            continue

        if cur is None:
            continue
        body = _MAVEN_PREFIX.sub("", ln) if ln.startswith("[") else ln
        if _SUMMARY.match(body.strip()) or ln.startswith("[INFO]") or body.startswith("-> ")\
                or body.startswith("Failed to execute goal") or body.startswith("BUILD "):
            cur = None
        else:
            cur.lines.append(body)

    res = []
    seen = set()
    for r in records:
        if r.severity != "error":
            continue
        m = r.header
        symbol = symbol_kind = location = None
        column = r.column
        for ln in r.lines:
            s = _SYMBOL.match(ln)
            if s is not None:
                symbol_kind, symbol = parse_symbol(s.group("value"))
                continue
            loc = _LOCATION.match(ln)
            if loc is not None:
                location = loc.group("value").strip()
                continue
            if column is None and ln.strip() == "^":
                column = ln.index("^") + 1

        raw_lines = [m.group(0)] + [ln for ln in r.lines if ln.strip()]
        f = PurePath(m.group("file"))
        d = Diagnostic(
            error_type=m.group("msg").strip(),
            file=f,
            line=int(m.group("line")),
            raw="\n".join(raw_lines),
            symbol=symbol,
            symbol_kind=symbol_kind,
            location=location,
            column=column,
            in_test_file=same_file(f, test_file),
        )
        key = (d.file, d.line, d.column, d.error_type, d.symbol)
        if key in seen:
            continue
        seen.add(key)
        res.append(d)

    if not res and not records and "error" in text.lower():
        res.append(Diagnostic(UNPARSED, PurePath(test_file), 0, text.strip()))
    return res


def count_errors(diagnostics: List[Diagnostic]) -> int:
    """
    Number of distinct compiler error records
    """
    return len(diagnostics)


def relativize_output(raw_output: str, root: Path) -> str:
    """
    Make paths in the tool output relative to the root
    """
    prefix = str(root).rstrip("/\\")
    for p in (prefix + "/", prefix + "\\"):
        raw_output = raw_output.replace(p, "")
    return raw_output
