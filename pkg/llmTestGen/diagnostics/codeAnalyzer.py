"""
Locate the code elements which caused compilation errors and collect
the context of the project classes they belong to
"""
from dataclasses import dataclass
from enum import Enum
import logging
from pathlib import Path
import re
from typing import Dict, List, Optional, Sequence, Tuple

from javalang import tree as jtree

from llmTestGen.corpus.dataPair import ProjectRef
from llmTestGen.diagnostics.emParser import Diagnostic, UNPARSED
from llmTestGen.errors import JavaSyntaxError, PreconditionError
from llmTestGen.java.javaSource import JavaSource, body_members, simple_type_name

logger = logging.getLogger(__name__)

_IMPORT = re.compile(r"^\s*import\s+(static\s+)?(?P<path>[\w.]+(\.\*)?)\s*;", re.MULTILINE)
_PACKAGE = re.compile(r"^\s*package\s+(?P<name>[\w.]+)\s*;", re.MULTILINE)
_NEW = re.compile(r"\bnew\s+(?P<name>[A-Z][\w$]*)")
_STATIC_RECEIVER = re.compile(r"(?<![\w$.])(?P<name>[A-Z][\w$]*)\s*\.\s*[\w$]+\s*\(")
_LOCATION_TYPE = re.compile(r"\bof type (?P<type>\S+)$")
_LOCATION_CLASS = re.compile(r"^(class|interface|enum) (?P<name>[\w$.]+)")


class ElementKind(Enum):
    CLASS = "class"
    METHOD = "method"
    VARIABLE = "variable"
    UNKNOWN = "unknown"


_KIND_OF_SYMBOL = {
    "class": ElementKind.CLASS,
    "interface": ElementKind.CLASS,
    "enum": ElementKind.CLASS,
    "method": ElementKind.METHOD,
    "constructor": ElementKind.CLASS,
    "variable": ElementKind.VARIABLE,
}


@dataclass(frozen=True)
class BuggyElement():
    """
    Object or variable at the line of the test which caused the error

    :ivar ~.declaring_class_hint: name of the class which the element belongs to
        if it is known from the error message
    """
    identifier: str
    element_kind: ElementKind
    declaring_class_hint: Optional[str] = None

    def __post_init__(self):
        if not self.identifier and self.element_kind != ElementKind.UNKNOWN:
            raise PreconditionError("empty identifier of a known element", self)


UNKNOWN_ELEMENT = BuggyElement("", ElementKind.UNKNOWN)


@dataclass(frozen=True)
class ClassContext():
    """
    Declaration and public method signatures of a project class

    :ivar ~.class_name: fully qualified name of the class
    """
    class_name: str
    class_declaration: str
    public_method_signatures: Tuple[str, ...]

    @property
    def simple_name(self) -> str:
        return self.class_name.rsplit(".", 1)[-1]


def _own_class_name(d: Diagnostic) -> str:
    return d.file.stem


def locate_buggy_elements(d: Diagnostic, test_source: str) -> List[BuggyElement]:
    """
    All elements implicated by the diagnostic, the symbol named
    in the error message first, then the classes used on the buggy line

    :return: [UNKNOWN_ELEMENT] if nothing is known about the error location
    """
    lines = test_source.replace("\r\n", "\n").split("\n")
    if d.error_type == UNPARSED or not (1 <= d.line <= len(lines)):
        return [UNKNOWN_ELEMENT]

    own = _own_class_name(d)
    res = []

    def add(e: BuggyElement):
        if e.identifier == own and e.element_kind == ElementKind.CLASS:
            return
        if all((x.identifier, x.element_kind) != (e.identifier, e.element_kind) for x in res):
            res.append(e)

    if d.symbol:
        kind = _KIND_OF_SYMBOL.get(d.symbol_kind, ElementKind.UNKNOWN)
        owner = None
        loc = d.location or ""
        m = _LOCATION_TYPE.search(loc)
        if m is not None:
            owner = simple_type_name(m.group("type"))
        else:
            m = _LOCATION_CLASS.match(loc)
            if m is not None:
                owner = m.group("name")

        if kind == ElementKind.METHOD and owner is not None\
                and owner.rsplit(".", 1)[-1] != own:
            # the method is missing in some other class, the class is what helps
            add(BuggyElement(owner, ElementKind.CLASS, owner))
        elif kind != ElementKind.UNKNOWN:
            hint = owner if owner is not None and owner.rsplit(".", 1)[-1] != own else None
            add(BuggyElement(d.symbol, kind, hint))

    line = lines[d.line - 1]
    for r in (_NEW, _STATIC_RECEIVER):
        for m in r.finditer(line):
            name = m.group("name")
            add(BuggyElement(name, ElementKind.CLASS, name))

    if not res:
        return [UNKNOWN_ELEMENT]
    return res


def locate_buggy_element(d: Diagnostic, test_source: str) -> BuggyElement:
    return locate_buggy_elements(d, test_source)[0]


def imports_of(test_source: str) -> Tuple[Optional[str], List[str]]:
    """
    :return: tuple (package of the test, imported names)
    """
    p = _PACKAGE.search(test_source)
    pkg = None if p is None else p.group("name")
    return pkg, [m.group("path") for m in _IMPORT.finditer(test_source)]


class ProjectClassIndex():
    """
    Declarations of all classes in the production sources of the project
    indexed by simple name

    :note: built once per run, read only after construction
    """

    def __init__(self, project: ProjectRef):
        self.project = project
        self._by_simple_name = {}  # type: Dict[str, List[ClassContext]]
        self._by_name = {}  # type: Dict[str, ClassContext]
        for root in project.source_roots:
            if not root.is_dir():
                continue
            for f in sorted(root.rglob("*.java"), key=lambda p: p.as_posix()):
                self._add_file(f)
        for ctxs in self._by_simple_name.values():
            ctxs.sort(key=lambda c: c.class_name)

    def _add_file(self, path: Path):
        try:
            src = JavaSource.from_file(path)
        except JavaSyntaxError as e:
            logger.warning("class index skips unparseable %s: %s", path, e)
            return

        pkg = src.package
        for name, t in src.iter_types():
            fqn = name if not pkg else f"{pkg:s}.{name:s}"
            ctx = ClassContext(fqn, src.declaration_text(t),
                               tuple(self._signatures(src, t)))
            self._by_name[fqn] = ctx
            self._by_simple_name.setdefault(t.name, []).append(ctx)

    @staticmethod
    def _signatures(src: JavaSource, t) -> List[str]:
        is_interface = isinstance(t, jtree.InterfaceDeclaration)
        res = []
        for m in body_members(t):
            if not isinstance(m, (jtree.MethodDeclaration, jtree.ConstructorDeclaration)):
                continue
            if is_interface or "public" in m.modifiers:
                res.append(src.declaration_text(m))
        return res

    def __len__(self):
        return len(self._by_name)

    def candidates(self, simple_name: str) -> List[ClassContext]:
        return list(self._by_simple_name.get(simple_name, ()))

    def lookup(self, name: str, test_source: str="") -> Optional[ClassContext]:
        """
        Find the class by its name as used in the test

        The candidates with the same simple name are resolved by the single
        type imports of the test, then by its wildcard imports, then by
        the package of the test, then the first one by qualified name is used.
        """
        if "." in name:
            ctx = self._by_name.get(name)
            if ctx is not None:
                return ctx
            name = name.rsplit(".", 1)[-1]

        cands = self._by_simple_name.get(name)
        if not cands:
            return None
        elif len(cands) == 1:
            return cands[0]

        pkg, imports = imports_of(test_source)
        for c in cands:
            if c.class_name in imports:
                return c
        wildcards = [i[:-2] for i in imports if i.endswith(".*")]
        for c in cands:
            if c.class_name.rsplit(".", 1)[0] in wildcards:
                return c
        if pkg is not None:
            for c in cands:
                if c.class_name == f"{pkg:s}.{name:s}":
                    return c
        return cands[0]

    def resolve(self, e: BuggyElement, test_source: str="") -> Optional[ClassContext]:
        if e.element_kind == ElementKind.UNKNOWN:
            raise PreconditionError("can not resolve the context of an unknown element")
        if e.element_kind == ElementKind.CLASS:
            name = e.identifier
        else:
            name = e.declaring_class_hint
        if not name:
            return None
        return self.lookup(name, test_source)

    def collect(self, diagnostics: Sequence[Diagnostic], test_source: str) -> List[ClassContext]:
        """
        Contexts of all buggy elements of the diagnostics of the test file,
        de-duplicated, in the order of diagnostics
        """
        res = []
        for d in diagnostics:
            if not d.in_test_file:
                continue
            for e in locate_buggy_elements(d, test_source):
                if e.element_kind == ElementKind.UNKNOWN:
                    continue
                ctx = self.resolve(e, test_source)
                if ctx is not None and ctx not in res:
                    res.append(ctx)
        return res


def resolve_class_context(e: BuggyElement, project: ProjectRef,
                          test_source: str="") -> Optional[ClassContext]:
    return ProjectClassIndex(project).resolve(e, test_source)
