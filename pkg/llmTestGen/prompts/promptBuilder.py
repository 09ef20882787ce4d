"""
Prompts for the chat model

Every prompt consists of the system message which sets the role of the model
and of a single user message. The user message is composed from the natural
language instruction (templates/<version>/*.txt) and the code context part::

    // Focal method
    <source of the focal method>

    // Focal class: <name>
    <class declaration>

    // Fields
    <field declarations>

    // Method signatures
    <signatures of constructors and methods>
"""
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from llmTestGen.constants import DEFAULT_TOKEN_BUDGET, PROMPT_TEMPLATE_VERSION
from llmTestGen.corpus.dataPair import FocalContext
from llmTestGen.diagnostics.codeAnalyzer import ClassContext
from llmTestGen.diagnostics.emParser import Diagnostic
from llmTestGen.errors import PreconditionError
from llmTestGen.utils import estimate_tokens

TEMPLATES_DIR = Path(__file__).parent / "templates"
BUGGY_LINE_TAG = "<Buggy line>"
# between the instruction and the code context
CODE_CONTEXT_SEPARATOR = "\n\n"


class Role(Enum):
    SYSTEM = "system"
    USER = "user"


class PromptKind(Enum):
    BASIC = "basic"
    INTENTION = "intention"
    GENERATION = "generation"
    REFINEMENT = "refinement"


@dataclass(frozen=True)
class Message():
    role: Role
    content: str

    def to_record(self) -> dict:
        return {"role": self.role.value, "content": self.content}


@dataclass(frozen=True)
class PromptDoc():
    """
    Ordered role-tagged messages sent to the model as one conversation

    :ivar ~.token_estimate: estimated number of tokens of all messages
    :ivar ~.truncated: True if some code context had to be dropped
        to fit into the token budget
    """
    messages: Tuple[Message, ...]
    kind: PromptKind
    token_estimate: int
    truncated: bool = False
    template_version: str = PROMPT_TEMPLATE_VERSION

    def __post_init__(self):
        msgs = self.messages
        if not msgs:
            raise PreconditionError("prompt without messages")
        if msgs[0].role != Role.SYSTEM or any(m.role == Role.SYSTEM for m in msgs[1:]):
            raise PreconditionError("prompt has to start with its only system message", msgs)
        if self.token_estimate < estimate_tokens(self.char_count):
            raise PreconditionError("token estimate is too low", self.token_estimate)

    @property
    def char_count(self) -> int:
        return sum(len(m.content) for m in self.messages)

    @property
    def user_text(self) -> str:
        return "\n".join(m.content for m in self.messages if m.role == Role.USER)

    def to_records(self) -> List[dict]:
        return [m.to_record() for m in self.messages]


def _prompt(kind: PromptKind, system: str, user: str, truncated: bool=False,
            template_version: str=PROMPT_TEMPLATE_VERSION) -> PromptDoc:
    msgs = (Message(Role.SYSTEM, system), Message(Role.USER, user))
    est = estimate_tokens(len(system) + len(user))
    return PromptDoc(msgs, kind, est, truncated, template_version)


class IntentionSource(Enum):
    LLM = "llm"
    MANUAL = "manual"


@dataclass(frozen=True)
class Intention():
    """
    Natural language description of the intended functionality of the focal method
    """
    text: str
    source: IntentionSource = IntentionSource.LLM

    def __post_init__(self):
        if not self.text.strip():
            raise PreconditionError("empty intention")


class PromptTemplates():
    """
    Versioned set of the natural language parts of the prompts

    :note: trailing new line of the template file is not a part of the template
    """

    def __init__(self, version: str=PROMPT_TEMPLATE_VERSION, root: Path=TEMPLATES_DIR):
        self.version = version
        self.root = root / version
        if not self.root.is_dir():
            raise PreconditionError(f"unknown prompt template version {version:s}")
        self._cache = {}  # type: Dict[str, str]

    def load(self, name: str) -> str:
        try:
            return self._cache[name]
        except KeyError:
            pass
        text = (self.root / f"{name:s}.txt").read_text(encoding="utf-8")
        if text.endswith("\n"):
            text = text[:-1]
        self._cache[name] = text
        return text

    def format(self, name: str, **kwargs) -> str:
        return self.load(name).format(**kwargs)


_DEFAULT_TEMPLATES = None  # type: Optional[PromptTemplates]


def default_templates() -> PromptTemplates:
    global _DEFAULT_TEMPLATES
    if _DEFAULT_TEMPLATES is None:
        _DEFAULT_TEMPLATES = PromptTemplates()
    return _DEFAULT_TEMPLATES


def render_code_context(ctx: FocalContext, fields_decls: Optional[Sequence[str]]=None,
                        method_signatures: Optional[Sequence[str]]=None) -> str:
    """
    Code context part of the prompt, empty sections are omitted
    """
    if fields_decls is None:
        fields_decls = ctx.fields_decls
    if method_signatures is None:
        method_signatures = ctx.method_signatures

    sections = [
        f"// Focal method\n{ctx.focal_method_source:s}",
        f"// Focal class: {ctx.focal_class_name:s}\n{ctx.class_declaration:s}",
    ]
    if fields_decls:
        sections.append("// Fields\n" + "\n".join(fields_decls))
    if method_signatures:
        sections.append("// Method signatures\n" + "\n".join(s + ";" for s in method_signatures))
    return "\n\n".join(sections)


def _code_prompt_overhead(ctx: FocalContext, templates: PromptTemplates) -> int:
    """
    Number of characters of the longest system message and instruction
    of the prompts which carry the code context, the intention text excluded
    """
    basic = templates.format("basic",
                             focal_method_name=ctx.focal_method_name,
                             framework_version=ctx.framework_version)
    heads = (
        (templates.load("system"), basic),
        (templates.load("intention_system"),
         templates.format("intention", focal_method_name=ctx.focal_method_name)),
        (templates.load("system"), templates.format("generation", intention="") + "\n\n" + basic),
    )
    return max(len(s) + len(h) for s, h in heads) + len(CODE_CONTEXT_SEPARATOR)


def _fit_code_context(ctx: FocalContext, token_budget: int,
                      templates: PromptTemplates) -> Tuple[str, bool]:
    """
    Render the code context, drop method signatures from the end and then
    fields from the end until the prompt fits into the budget

    The result depends only on the context, budget and templates, so the
    basic, intention and generation prompts carry the same code context.

    :note: the focal method is never dropped even if the budget is exceeded
    """
    fixed_len = _code_prompt_overhead(ctx, templates)
    fields = list(ctx.fields_decls)
    sigs = list(ctx.method_signatures)
    truncated = False
    while True:
        cc = render_code_context(ctx, fields, sigs)
        if estimate_tokens(fixed_len + len(cc)) <= token_budget:
            return cc, truncated
        if sigs:
            sigs.pop()
        elif fields:
            fields.pop()
        else:
            return cc, truncated
        truncated = True


def _code_prompt(kind: PromptKind, system: str, head: str, ctx: FocalContext,
                 token_budget: int, templates: PromptTemplates) -> PromptDoc:
    cc, truncated = _fit_code_context(ctx, token_budget, templates)
    return _prompt(kind, system, head + CODE_CONTEXT_SEPARATOR + cc, truncated, templates.version)


def build_basic_prompt(ctx: FocalContext, token_budget: int=DEFAULT_TOKEN_BUDGET,
                       templates: Optional[PromptTemplates]=None) -> PromptDoc:
    """
    Ask for a test of the focal method directly
    """
    t = templates or default_templates()
    instr = t.format("basic",
                     focal_method_name=ctx.focal_method_name,
                     framework_version=ctx.framework_version)
    return _code_prompt(PromptKind.BASIC, t.load("system"), instr, ctx, token_budget, t)


def build_intention_prompt(ctx: FocalContext, token_budget: int=DEFAULT_TOKEN_BUDGET,
                           templates: Optional[PromptTemplates]=None) -> PromptDoc:
    """
    Ask for the description of the intended functionality of the focal method
    """
    t = templates or default_templates()
    instr = t.format("intention", focal_method_name=ctx.focal_method_name)
    return _code_prompt(PromptKind.INTENTION, t.load("intention_system"), instr, ctx, token_budget, t)


def build_generation_prompt(ctx: FocalContext, intention: Intention,
                            token_budget: int=DEFAULT_TOKEN_BUDGET,
                            templates: Optional[PromptTemplates]=None) -> PromptDoc:
    """
    The basic prompt preceded by the intention of the focal method

    :note: the intention is never truncated
    """
    if not isinstance(intention, Intention) or not intention.text.strip():
        raise PreconditionError("generation prompt requires a non-empty intention")
    t = templates or default_templates()
    head = t.format("generation", intention=intention.text.strip()) + "\n\n" + t.format(
        "basic",
        focal_method_name=ctx.focal_method_name,
        framework_version=ctx.framework_version)
    return _code_prompt(PromptKind.GENERATION, t.load("system"), head, ctx, token_budget, t)


def annotate_buggy_lines(test_source: str, diagnostics: Sequence[Diagnostic]) -> Tuple[str, int]:
    """
    Append the buggy line tag with the error descriptions to every line
    of the test which triggered a compilation error

    :return: tuple (annotated source, number of tagged lines)
    """
    lines = test_source.replace("\r\n", "\n").split("\n")
    errors = {}  # type: Dict[int, List[str]]
    for d in diagnostics:
        if d.in_test_file and 1 <= d.line <= len(lines):
            descrs = errors.setdefault(d.line, [])
            if d.description not in descrs:
                descrs.append(d.description)

    for line_no, descrs in errors.items():
        i = line_no - 1
        lines[i] = f"{lines[i]:s}  // {BUGGY_LINE_TAG:s} {'; '.join(descrs):s}"
    return "\n".join(lines), len(errors)


def render_class_context(c: ClassContext) -> str:
    """
    e.g.::

        // Xml class
        public class Xml {
            public void setAttribute(String name, String value);
        }
    """
    body = "".join(f"    {s:s};\n" for s in c.public_method_signatures)
    return f"// {c.simple_name:s} class\n{c.class_declaration:s} {{\n{body:s}}}"


def build_refinement_prompt(prev_test: str, diagnostics: Sequence[Diagnostic],
                            extra: Sequence[ClassContext]=(),
                            token_budget: int=DEFAULT_TOKEN_BUDGET,
                            templates: Optional[PromptTemplates]=None) -> PromptDoc:
    """
    Ask to fix the compilation errors of the previous test

    The prompt is a new conversation, the previous test is inlined with its
    buggy lines tagged and the contexts of the classes of the buggy elements
    are appended. Class contexts are dropped from the end if the prompt
    does not fit into the budget.
    """
    if not prev_test.strip():
        raise PreconditionError("refinement of an empty test")
    if not diagnostics:
        raise PreconditionError("refinement without diagnostics")
    t = templates or default_templates()
    system = t.load("system")
    annotated, _ = annotate_buggy_lines(prev_test, diagnostics)
    head = t.format("refinement_header", tag=BUGGY_LINE_TAG) + "\n" + annotated
    tail = t.load("refinement")

    contexts = [render_class_context(c) for c in extra]
    truncated = False
    while True:
        user = "\n\n".join([head] + contexts + [tail])
        if not contexts or estimate_tokens(len(system) + len(user)) <= token_budget:
            break
        contexts.pop()
        truncated = True
    return _prompt(PromptKind.REFINEMENT, system, user, truncated, t.version)
