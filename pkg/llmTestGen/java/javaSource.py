"""
Structural access to Java sources

Everything which needs to know where a class, field or method starts and ends
goes through :class:`JavaSource`. The AST comes from javalang, the exact extent
of declarations and their verbatim header text come from the token stream
because javalang nodes only know the position of their first keyword.
"""
from pathlib import Path
from textwrap import dedent
from typing import Dict, Iterator, List, Optional, Tuple

import javalang
from javalang import tree as jtree
from javalang.tokenizer import Annotation, Identifier, Modifier

from llmTestGen.constants import TEST_ANNOTATIONS
from llmTestGen.errors import JavaSyntaxError

TYPE_DECLARATIONS = (jtree.ClassDeclaration, jtree.InterfaceDeclaration,
                     jtree.EnumDeclaration)
# name of the class used to parse a bare method
WRAPPER_CLASS = "LlmTestGenWrapper"

_NO_SPACE_BEFORE = frozenset([",", ")", "]", ".", "...", ";", "(", "["])
_NO_SPACE_AFTER = frozenset(["(", "[", ".", "@", "<"])


def _syntax_error(e: Exception, line_offset: int=0) -> JavaSyntaxError:
    at = getattr(e, "at", None)
    pos = getattr(at, "position", None)
    line = None
    if pos is not None:
        line = pos.line - line_offset
    msg = getattr(e, "description", None) or str(e) or e.__class__.__name__
    return JavaSyntaxError(msg, line)


def render_type(t) -> str:
    """
    Java text of a javalang type node (None is void)
    """
    if t is None:
        return "void"
    name = t.name
    args = getattr(t, "arguments", None)
    if args:
        name += "<" + ", ".join(_render_type_argument(a) for a in args) + ">"
    sub = getattr(t, "sub_type", None)
    if sub is not None:
        name += "." + render_type(sub)
    return name + "[]" * len(t.dimensions or ())


def _render_type_argument(a) -> str:
    if a.pattern_type == "?":
        return "?"
    elif a.pattern_type:
        return f"? {a.pattern_type:s} {render_type(a.type):s}"
    return render_type(a.type)


def simple_type_name(type_name: str) -> str:
    """
    "java.util.List<String>[]" -> "List[]"
    """
    depth = 0
    base = []
    for ch in type_name:
        if ch == "<":
            depth += 1
        elif ch == ">":
            depth -= 1
        elif depth == 0:
            base.append(ch)
    base = "".join(base).strip()
    dims = ""
    while base.endswith("[]"):
        base = base[:-2].rstrip()
        dims += "[]"
    return base.split(".")[-1] + dims


def is_test_method(m: jtree.MethodDeclaration) -> bool:
    return any(a.name.split(".")[-1] in TEST_ANNOTATIONS for a in m.annotations)


def body_members(type_node) -> List:
    body = type_node.body
    if body is None:
        return []
    elif isinstance(body, list):
        return body
    # enum body
    return list(body.declarations or ())


def method_invocations(node, name: str) -> List[jtree.MethodInvocation]:
    return [inv for _, inv in node.filter(jtree.MethodInvocation)
            if inv.member == name]


def _join_tokens(tokens) -> str:
    out = []
    prev = None
    for t in tokens:
        v = t.value
        if prev is not None:
            glue = (v in _NO_SPACE_BEFORE
                    or prev.value in _NO_SPACE_AFTER
                    or set(v) == {">"}
                    or (v == "<" and isinstance(prev, Identifier)))
            if not glue:
                out.append(" ")
        out.append(v)
        prev = t
    return "".join(out)


class JavaSource():
    """
    Parsed Java compilation unit together with its token stream

    :ivar ~.text: source text with normalized line endings
    :ivar ~.path: file path if loaded from the file
    :ivar ~.tree: javalang CompilationUnit
    :ivar ~.tokens: list of javalang tokens (comments excluded)
    """

    def __init__(self, text: str, path: Optional[Path]=None):
        self.text = text.replace("\r\n", "\n").replace("\r", "\n")
        self.path = path
        self.lines = self.text.split("\n")
        try:
            self.tokens = list(javalang.tokenizer.tokenize(self.text))
            self.tree = javalang.parser.Parser(iter(self.tokens)).parse()
        except Exception as e:
            # javalang raises assorted errors on malformed input
            raise _syntax_error(e)
        self._token_index = {
            (t.position.line, t.position.column): i
            for i, t in enumerate(self.tokens)
        }  # type: Dict[Tuple[int, int], int]

    @classmethod
    def from_file(cls, path: Path) -> "JavaSource":
        text = Path(path).read_text(encoding="utf-8", errors="replace")
        return cls(text, path)

    @property
    def package(self) -> str:
        p = self.tree.package
        return "" if p is None else p.name

    @property
    def imports(self) -> List[str]:
        res = []
        for imp in self.tree.imports:
            p = imp.path + (".*" if imp.wildcard else "")
            if imp.static:
                p = "static " + p
            res.append(p)
        return res

    def iter_types(self) -> Iterator[Tuple[str, object]]:
        """
        All type declarations (nested included) as tuples
        (dotted name relative to the package, declaration node)
        in the order of the source
        """
        def walk(prefix: str, type_node):
            name = type_node.name if not prefix else f"{prefix:s}.{type_node.name:s}"
            yield name, type_node
            for m in body_members(type_node):
                if isinstance(m, TYPE_DECLARATIONS):
                    yield from walk(name, m)

        for t in self.tree.types:
            if isinstance(t, TYPE_DECLARATIONS):
                yield from walk("", t)

    def find_type(self, qualified_name: str):
        for name, t in self.iter_types():
            if name == qualified_name:
                return t
        return None

    def methods(self, type_node) -> List[jtree.MethodDeclaration]:
        return [m for m in body_members(type_node)
                if isinstance(m, jtree.MethodDeclaration)]

    def constructors(self, type_node) -> List[jtree.ConstructorDeclaration]:
        return [m for m in body_members(type_node)
                if isinstance(m, jtree.ConstructorDeclaration)]

    def fields(self, type_node) -> List[jtree.FieldDeclaration]:
        return [m for m in body_members(type_node)
                if isinstance(m, jtree.FieldDeclaration)]

    # token level helpers
    def _index_of(self, node) -> int:
        pos = node.position
        assert pos is not None, node
        return self._token_index[(pos.line, pos.column)]

    def _skip_annotation(self, i: int) -> int:
        # "@" qualified.Name ["(" ... ")"]
        toks = self.tokens
        i += 1
        while i < len(toks) and (isinstance(toks[i], Identifier) or toks[i].value == "."):
            i += 1
        if i < len(toks) and toks[i].value == "(":
            depth = 0
            while i < len(toks):
                v = toks[i].value
                if v == "(":
                    depth += 1
                elif v == ")":
                    depth -= 1
                    if depth == 0:
                        return i + 1
                i += 1
        return i

    def _decl_start(self, node) -> int:
        """
        Index of the first modifier token of the declaration
        (annotations are not part of the declaration text)
        """
        toks = self.tokens
        i = self._index_of(node)
        while i > 0 and isinstance(toks[i - 1], Modifier):
            i -= 1
        while isinstance(toks[i], Annotation):
            i = self._skip_annotation(i)
        return i

    def _header_end(self, node) -> int:
        """
        Index of the token which ends the declaration header ("{" or ";")
        """
        toks = self.tokens
        depth = 0
        i = self._index_of(node)
        while i < len(toks):
            v = toks[i].value
            if v == "(":
                depth += 1
            elif v == ")":
                depth -= 1
            elif depth == 0 and v in ("{", ";"):
                return i
            i += 1
        raise AssertionError("Declaration without end", node)

    def _matching_brace(self, i: int) -> int:
        toks = self.tokens
        assert toks[i].value == "{", toks[i]
        depth = 0
        while i < len(toks):
            v = toks[i].value
            if v == "{":
                depth += 1
            elif v == "}":
                depth -= 1
                if depth == 0:
                    return i
            i += 1
        raise AssertionError("Unbalanced braces", self.path)

    def declaration_text(self, node) -> str:
        """
        Header of a class/method/constructor declaration without body,
        modifiers are preserved in the order of the source

        e.g. "public final class StrBuilder implements CharSequence"
        or "public StrBuilder setCharAt(int index, char ch)"

        :note: members of interfaces do not have position in javalang,
            their signature is rendered from the AST
        """
        if node.position is None:
            return render_signature(node)
        start = self._decl_start(node)
        end = self._header_end(node)
        return _join_tokens(self.tokens[start:end])

    def field_text(self, node: jtree.FieldDeclaration) -> str:
        toks = self.tokens
        start = self._decl_start(node)
        i = self._index_of(node)
        depth = 0
        while i < len(toks):
            v = toks[i].value
            if v in ("(", "{", "["):
                depth += 1
            elif v in (")", "}", "]"):
                depth -= 1
            elif depth == 0 and v == ";":
                break
            i += 1
        return _join_tokens(toks[start:i + 1])

    def member_span(self, node) -> Tuple[int, int]:
        """
        :return: 1-based (start line, end line) of the declaration
        """
        start = self.tokens[self._decl_start(node)].position.line
        end_i = self._header_end(node)
        if self.tokens[end_i].value == "{":
            end_i = self._matching_brace(end_i)
        return start, self.tokens[end_i].position.line

    def member_source(self, node) -> str:
        start, end = self.member_span(node)
        return dedent("\n".join(self.lines[start - 1:end])).strip("\n")

    def find_member(self, type_node, name: str, start_line: int):
        for m in body_members(type_node):
            if isinstance(m, (jtree.MethodDeclaration, jtree.ConstructorDeclaration))\
                    and m.name == name and m.position is not None\
                    and self.member_span(m)[0] == start_line:
                return m
        return None


_MODIFIER_ORDER = ("public", "protected", "private", "abstract", "static",
                   "final", "transient", "volatile", "synchronized", "native",
                   "strictfp", "default")


def render_signature(node) -> str:
    mods = [m for m in _MODIFIER_ORDER if m in node.modifiers]
    params = ", ".join(f"{t:s} {p.name:s}" for t, p in zip(param_types(node), node.parameters))
    if isinstance(node, jtree.ConstructorDeclaration):
        head = node.name
    else:
        head = f"{render_type(node.return_type):s} {node.name:s}"
    sig = " ".join(mods + [f"{head:s}({params:s})"])
    if node.throws:
        sig += " throws " + ", ".join(node.throws)
    return sig


def param_types(node) -> List[str]:
    res = []
    for p in node.parameters:
        t = render_type(p.type)
        if p.varargs:
            t += "..."
        res.append(t)
    return res


def parse_compilation_unit(text: str) -> JavaSource:
    return JavaSource(text)


def parse_member(text: str) -> JavaSource:
    """
    Parse one or more class members (bare methods) by wrapping them into a class

    :note: lines reported in errors are relative to the text
    """
    wrapped = f"class {WRAPPER_CLASS:s} {{\n{text:s}\n}}\n"
    try:
        return JavaSource(wrapped)
    except JavaSyntaxError as e:
        line = None if e.line is None else max(e.line - 1, 1)
        raise JavaSyntaxError(e.diagnostic, line)


def _top_level_type_names(text: str) -> Iterator[str]:
    """
    Names declared by class/interface/enum keywords at the top level of the text

    "Foo.class" literals and keywords inside parentheses (annotation arguments)
    do not declare a type.
    """
    try:
        toks = list(javalang.tokenizer.tokenize(text))
    except Exception:
        return
    braces = 0
    parens = 0
    prev = None
    for t, nxt in zip(toks, toks[1:]):
        v = t.value
        if v == "{":
            braces += 1
        elif v == "}":
            braces -= 1
        elif v == "(":
            parens += 1
        elif v == ")":
            parens -= 1
        elif braces == 0 and parens == 0 and v in ("class", "interface", "enum")\
                and isinstance(nxt, Identifier)\
                and (prev is None or prev.value != "."):
            yield nxt.value
        prev = t


def looks_like_type_declaration(text: str) -> bool:
    """
    True if the text declares a class/interface/enum at its top level
    (and is not just a method)
    """
    return next(_top_level_type_names(text), None) is not None


def top_level_type_name(text: str) -> Optional[str]:
    """
    Name of the first class/interface/enum declared at the top level of the text
    """
    return next(_top_level_type_names(text), None)


def is_parseable(text: str) -> bool:
    """
    True if the text parses as a compilation unit or as class members
    """
    if not text.strip():
        return False
    try:
        if looks_like_type_declaration(text):
            parse_compilation_unit(text)
        else:
            parse_member(text)
    except JavaSyntaxError:
        return False
    return True
