"""
Collection of data pairs (focal method, test method) from a project

* test methods are the methods annotated with @Test under the test roots
* the focal method of "testFunction()" in "src/test/java/FooTest.java"
  is "Function()" in "src/main/java/Foo.java"
* overloads are filtered by the number and the types of the arguments
  of the calls in the test
"""
from dataclasses import dataclass
import logging
from pathlib import Path
import threading
from typing import Dict, List, Optional, Sequence, Tuple
import xml.etree.ElementTree as ET

from javalang import tree as jtree

from llmTestGen.constants import DEFAULT_FRAMEWORK_VERSION, JUNIT4, JUNIT5
from llmTestGen.corpus.dataPair import DataPair, FocalContext, MethodRef, \
    ProjectRef
from llmTestGen.errors import ExtractionError, JavaSyntaxError, ProjectError
from llmTestGen.java.javaSource import JavaSource, body_members, \
    is_test_method, method_invocations, param_types, render_type, \
    simple_type_name

logger = logging.getLogger(__name__)

TEST_PREFIX = "test"
TEST_CLASS_SUFFIX = "Test"

_BOXES = {
    "boolean": "Boolean", "byte": "Byte", "char": "Character", "short": "Short",
    "int": "Integer", "long": "Long", "float": "Float", "double": "Double",
}
_UNBOXED = {v: k for k, v in _BOXES.items()}
# no other class converts to them
_FINAL_REFERENCES = frozenset(_UNBOXED) | {"String"}
_WIDENING = {
    "byte": ("short", "int", "long", "float", "double"),
    "short": ("int", "long", "float", "double"),
    "char": ("int", "long", "float", "double"),
    "int": ("long", "float", "double"),
    "long": ("float", "double"),
    "float": ("double",),
}
# match levels of a call against a candidate
_NO_MATCH = 0
_COMPATIBLE = 1
_EXACT = 2


@dataclass(frozen=True)
class SkippedFile():
    path: Path
    reason: str


@dataclass(frozen=True)
class DroppedTest():
    test: MethodRef
    reason: str


def focal_method_name(test_method_name: str) -> Optional[str]:
    """
    "testFunction" -> "Function", None if there is no "test" prefix
    """
    if len(test_method_name) <= len(TEST_PREFIX)\
            or not test_method_name[:len(TEST_PREFIX)].lower() == TEST_PREFIX:
        return None
    return test_method_name[len(TEST_PREFIX):]


def focal_class_name(test_file: Path) -> Optional[str]:
    """
    "FooTest.java" -> "Foo"
    """
    stem = Path(test_file).stem
    if len(stem) <= len(TEST_CLASS_SUFFIX) or not stem.endswith(TEST_CLASS_SUFFIX):
        return None
    return stem[:-len(TEST_CLASS_SUFFIX)]


def names_match(stripped_test_name: str, method_name: str) -> bool:
    """
    The character after the "test" prefix is compared case-insensitively
    (testSetCharAt -> setCharAt), the rest of the name exactly
    """
    return stripped_test_name[1:] == method_name[1:]\
        and stripped_test_name[:1].lower() == method_name[:1].lower()


def literal_type(expr) -> Optional[str]:
    """
    Type of a literal or of a "new X(...)" expression, None for anything else
    """
    if getattr(expr, "selectors", None) or getattr(expr, "qualifier", None):
        return None
    if isinstance(expr, jtree.Literal):
        v = expr.value
        lv = v.lower()
        if v.startswith('"'):
            return "String"
        elif v.startswith("'"):
            return "char"
        elif v in ("true", "false"):
            return "boolean"
        elif v == "null":
            return None
        elif lv.startswith("0x") or lv.startswith("0b"):
            return "long" if lv.endswith("l") else "int"
        elif lv.endswith("l"):
            return "long"
        elif lv.endswith("f"):
            return "float"
        elif lv.endswith("d") or "." in lv or "e" in lv:
            return "double"
        return "int"
    elif isinstance(expr, jtree.ClassCreator):
        return simple_type_name(render_type(expr.type))
    return None


def _type_match(param_type: str, arg_type: Optional[str]) -> int:
    """
    Only mismatches provable from the simple names are _NO_MATCH,
    a supertype, an interface or a type variable may accept the argument
    """
    if arg_type is None:
        return _COMPATIBLE
    p = simple_type_name(param_type)
    if p == arg_type:
        return _EXACT
    if p in _BOXES:
        unboxed = _UNBOXED.get(arg_type, arg_type)
        if unboxed == p or p in _WIDENING.get(unboxed, ()):
            return _COMPATIBLE
        return _NO_MATCH
    elif p in _FINAL_REFERENCES:
        return _COMPATIBLE if _BOXES.get(arg_type) == p else _NO_MATCH
    elif p.endswith("[]") and (arg_type in _BOXES or arg_type in _FINAL_REFERENCES):
        return _NO_MATCH
    return _COMPATIBLE


def call_match(call: jtree.MethodInvocation, candidate: MethodRef) -> int:
    """
    :return: _NO_MATCH, _COMPATIBLE or _EXACT (all statically known argument
        types equal to parameter types)
    """
    params = list(candidate.param_types)
    args = call.arguments
    varargs = bool(params) and params[-1].endswith("...")
    if varargs:
        if len(args) < len(params) - 1:
            return _NO_MATCH
        elem = params[-1][:-3]
        params = params[:-1] + [elem] * (len(args) - len(params) + 1)
    elif len(args) != len(params):
        return _NO_MATCH

    level = _EXACT
    for p, a in zip(params, args):
        m = _type_match(p, literal_type(a))
        if m == _NO_MATCH:
            return _NO_MATCH
        level = min(level, m)
    return level


class CorpusExtractor():
    """
    Pairs test methods with focal methods and extracts the focal code context

    :ivar ~.project: project which is scanned
    :ivar ~.skipped: files which could not be parsed
    :ivar ~.dropped: test methods for which no unique focal method was found
    :ivar ~._sources: parsed file cache, None for unparseable files
    """

    def __init__(self, project: ProjectRef):
        project.validate()
        self.project = project
        self.skipped = []  # type: List[SkippedFile]
        self.dropped = []  # type: List[DroppedTest]
        self._sources = {}  # type: Dict[Path, Optional[JavaSource]]
        self._framework_version = None  # type: Optional[str]
        self._lock = threading.RLock()

    def _source(self, path: Path) -> Optional[JavaSource]:
        with self._lock:
            try:
                return self._sources[path]
            except KeyError:
                pass
            try:
                src = JavaSource.from_file(path)
            except JavaSyntaxError as e:
                logger.warning("skipping unparseable %s: %s", path, e)
                self.skipped.append(SkippedFile(path, str(e)))
                src = None
            self._sources[path] = src
            return src

    def _java_files(self, roots: Sequence[Path]) -> List[Path]:
        files = []
        try:
            for r in roots:
                if r.is_dir():
                    files.extend(p for p in r.rglob("*.java") if p.is_file())
        except OSError as e:
            raise ProjectError(f"can not read {self.project.root_path}: {e}")
        return sorted(files, key=lambda p: p.as_posix())

    def _method_ref(self, path: Path, class_name: str, src: JavaSource, m) -> MethodRef:
        start, end = src.member_span(m)
        pt = tuple(param_types(m))
        return MethodRef(path, class_name, m.name, len(pt), pt, start, end)

    def scan_test_classes(self) -> List[MethodRef]:
        """
        :return: all methods annotated with @Test under the test roots
            ordered by file path and line
        """
        res = []
        for path in self._java_files(self.project.test_roots):
            src = self._source(path)
            if src is None:
                continue
            for class_name, t in src.iter_types():
                for m in src.methods(t):
                    if is_test_method(m):
                        res.append(self._method_ref(path, class_name, src, m))
        res.sort(key=lambda m: m.sort_key)
        return res

    def _focal_type(self, test: MethodRef) -> Tuple[Optional[Path], Optional[JavaSource], object]:
        cls_name = focal_class_name(test.file_path)
        if cls_name is None:
            return None, None, None
        rel_dir = test.file_path.parent.relative_to(self.project.test_root_of(test.file_path))
        for root in self.project.source_roots:
            f = root / rel_dir / f"{cls_name:s}.java"
            if f.is_file():
                src = self._source(f)
                if src is not None:
                    t = src.find_type(cls_name)
                    if t is not None:
                        return f, src, t
        return None, None, None

    def _map(self, test: MethodRef) -> Tuple[Optional[MethodRef], str]:
        stripped = focal_method_name(test.method_name)
        if stripped is None:
            return None, "test method name has no \"test\" prefix"
        f, src, t = self._focal_type(test)
        if t is None:
            return None, "no focal class in the mirrored source path"
        candidates = [
            self._method_ref(f, t.name, src, m)
            for m in src.methods(t)
            if names_match(stripped, m.name)
        ]
        if not candidates:
            return None, f"no method matching \"{stripped:s}\" in {t.name:s}"
        focal = self.disambiguate_overloads(candidates, test)
        if focal is None:
            return None, f"ambiguous overloads of {candidates[0].method_name:s}"
        return focal, ""

    def map_test_to_focal(self, test: MethodRef) -> Optional[MethodRef]:
        return self._map(test)[0]

    def _test_node(self, test: MethodRef):
        src = self._source(test.file_path)
        if src is None:
            return None
        t = src.find_type(test.class_name)
        if t is None:
            return None
        return src.find_member(t, test.method_name, test.start_line)

    def disambiguate_overloads(self, candidates: Sequence[MethodRef],
                               test: MethodRef) -> Optional[MethodRef]:
        """
        Select the overload called by the test

        :return: the unique candidate which matches the calls in the test body,
            None if there is none or more than one
        """
        if not candidates:
            return None
        elif len(candidates) == 1:
            return candidates[0]

        name = candidates[0].method_name
        assert all(c.method_name == name and c.class_name == candidates[0].class_name
                   for c in candidates), candidates
        node = self._test_node(test)
        if node is None:
            return None

        survivors = []
        for call in method_invocations(node, name):
            levels = [call_match(call, c) for c in candidates]
            best = max(levels)
            if best == _NO_MATCH:
                continue
            for c, lvl in zip(candidates, levels):
                if lvl == best and c not in survivors:
                    survivors.append(c)

        if len(survivors) == 1:
            return survivors[0]
        return None

    def framework_version(self) -> str:
        """
        Unit test framework declared in the build manifest
        """
        if self._framework_version is None:
            self._framework_version = read_framework_version(self.project.manifest_path)
        return self._framework_version

    def extract_focal_context(self, focal: MethodRef) -> FocalContext:
        try:
            src = JavaSource.from_file(focal.file_path)
        except JavaSyntaxError as e:
            raise ExtractionError(e.diagnostic, e.line)
        except OSError as e:
            raise ExtractionError(str(e))

        t = src.find_type(focal.class_name)
        if t is None:
            raise ExtractionError(f"class {focal.class_name:s} not found in {focal.file_path}")
        node = src.find_member(t, focal.method_name, focal.start_line)
        if node is None:
            raise ExtractionError(f"method {focal} not found at line {focal.start_line:d}")

        signatures = []
        for m in body_members(t):
            if isinstance(m, jtree.ConstructorDeclaration)\
                    or (isinstance(m, jtree.MethodDeclaration)
                        and ("static" not in m.modifiers or m is node)):
                signatures.append(src.declaration_text(m))

        return FocalContext(
            focal_method_name=focal.method_name,
            focal_method_source=src.member_source(node),
            focal_class_name=focal.class_name,
            class_declaration=src.declaration_text(t),
            fields_decls=tuple(src.field_text(f) for f in src.fields(t)),
            method_signatures=tuple(signatures),
            framework_version=self.framework_version(),
        )

    def extract_pairs(self) -> List[DataPair]:
        pairs = []
        for test in self.scan_test_classes():
            focal, reason = self._map(test)
            if focal is None:
                logger.info("dropping %s: %s", test, reason)
                self.dropped.append(DroppedTest(test, reason))
            else:
                pairs.append(DataPair(focal, test, self.project))
        logger.info("%d data pairs extracted from %s", len(pairs), self.project.root_path)
        return pairs


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def read_framework_version(manifest: Path) -> str:
    if not manifest.is_file():
        return DEFAULT_FRAMEWORK_VERSION
    try:
        root = ET.parse(str(manifest)).getroot()
    except ET.ParseError as e:
        logger.warning("can not parse %s: %s", manifest, e)
        return DEFAULT_FRAMEWORK_VERSION

    for dep in root.iter():
        if _local_name(dep.tag) != "dependency":
            continue
        props = {_local_name(c.tag): (c.text or "").strip() for c in dep}
        artifact = props.get("artifactId", "")
        if artifact.startswith("junit-jupiter"):
            return JUNIT5
        elif artifact == "junit":
            version = props.get("version", "")
            if version[:1].isdigit():
                return f"JUnit {version.split('.')[0]:s}"
            return JUNIT4
    return DEFAULT_FRAMEWORK_VERSION


def scan_test_classes(project: ProjectRef) -> List[MethodRef]:
    return CorpusExtractor(project).scan_test_classes()


def map_test_to_focal(test: MethodRef, project: ProjectRef) -> Optional[MethodRef]:
    return CorpusExtractor(project).map_test_to_focal(test)


def disambiguate_overloads(candidates: Sequence[MethodRef], test: MethodRef,
                           project: ProjectRef) -> Optional[MethodRef]:
    return CorpusExtractor(project).disambiguate_overloads(candidates, test)


def extract_focal_context(focal: MethodRef, project: ProjectRef) -> FocalContext:
    return CorpusExtractor(project).extract_focal_context(focal)
