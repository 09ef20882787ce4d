from dataclasses import dataclass, replace
import logging
from pathlib import PurePath
from typing import Callable, List, Optional, Sequence, Tuple

from llmTestGen.constants import DEFAULT_FRAMEWORK_VERSION, GENERATED_TEST_SUFFIX
from llmTestGen.corpus.dataPair import MethodRef, ProjectRef
from llmTestGen.diagnostics.emParser import Diagnostic, UNPARSED, parse_diagnostics, \
    relativize_output
from llmTestGen.errors import JavaSyntaxError, PreconditionError
from llmTestGen.java.javaSource import parse_compilation_unit
from llmTestGen.validation.junitOutput import RuntimeFailure, parse_runtime_failure, \
    timeout_failure
from llmTestGen.validation.toolchain import ToolchainAdapter
from llmTestGen.validation.workspace import Workspace, materialize_test, render_test_class

logger = logging.getLogger(__name__)

SYNTAX_ERROR = "syntax error"
COMPILE_TIMEOUT = "compilation timed out"


@dataclass(frozen=True)
class OutcomeClass():
    """
    Result of the validation of one generated test

    :ivar ~.diagnostics: compile errors, or the syntax error of a test
        which does not parse
    :note: passed => compiled => syntactic_ok
    """
    syntactic_ok: bool
    compiled: bool
    passed: bool
    diagnostics: Tuple[Diagnostic, ...] = ()
    runtime_failure: Optional[RuntimeFailure] = None

    def __post_init__(self):
        if self.passed and not self.compiled:
            raise PreconditionError("passed test which does not compile", self)
        if self.compiled and not self.syntactic_ok:
            raise PreconditionError("compiled test which does not parse", self)
        if self.compiled and self.diagnostics:
            raise PreconditionError("compiled test with compile errors", self)
        if self.passed and self.runtime_failure is not None:
            raise PreconditionError("passed test with a failure", self)

    @property
    def error_count(self) -> int:
        """
        Number of distinct error records, the measure of the refinement progress
        """
        return len(self.diagnostics)

    def to_record(self) -> dict:
        return {
            "syntactic_ok": self.syntactic_ok,
            "compiled": self.compiled,
            "passed": self.passed,
            "diagnostics": [d.to_record() for d in self.diagnostics],
            "runtime_failure": None if self.runtime_failure is None else self.runtime_failure.to_record(),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "OutcomeClass":
        rf = rec.get("runtime_failure")
        return cls(rec["syntactic_ok"], rec["compiled"], rec["passed"],
                   tuple(Diagnostic.from_record(d) for d in rec.get("diagnostics", ())),
                   None if rf is None else RuntimeFailure.from_record(rf))


def classify(syntax: bool, diags: Sequence[Diagnostic], run: Optional[RuntimeFailure]) -> OutcomeClass:
    """
    Outcome of the test from the results of the individual checks

    :param run: failure of the execution, only for a test without compile errors
    """
    if run is not None and (not syntax or diags):
        raise PreconditionError("execution result of a test which was not compiled",
                                syntax, diags, run)
    diags = tuple(diags)
    if not syntax:
        return OutcomeClass(False, False, False, diags, None)
    elif diags:
        return OutcomeClass(True, False, False, diags, None)
    return OutcomeClass(True, True, run is None, (), run)


def check_syntax(test_source: str) -> bool:
    """
    True if the test parses as a compilation unit after it is wrapped
    into a test class the same way as it is materialized
    """
    if not test_source.strip():
        return False
    text, _ = render_test_class(test_source, "", "Focal", DEFAULT_FRAMEWORK_VERSION)
    try:
        parse_compilation_unit(text)
    except JavaSyntaxError:
        return False
    return True


@dataclass(frozen=True)
class Validation():
    """
    :ivar ~.test_text: text of the materialized test file, lines of diagnostics
        refer to it
    :ivar ~.test_file: path of the test file relative to the project
    :ivar ~.post_run: output of the post-run hook of an executed test
    """
    outcome: OutcomeClass
    test_text: str
    test_file: PurePath
    post_run: Optional[dict] = None


# called with the workspace of an executed test before it is removed,
# e.g. to collect the coverage with an external tool
PostRunHook = Callable[[Workspace, Validation], Optional[dict]]


class Validator():
    """
    Materializes the tests of one focal method in a private workspace,
    checks syntax, compiles and executes them

    :ivar ~.rerun_on_failure: number of additional executions of a failed test
        (for investigation of flaky tests)
    :ivar ~.post_run_hook: optional PostRunHook, its output is stored
        in the Validation
    """

    def __init__(self, project: ProjectRef, focal: MethodRef, toolchain: ToolchainAdapter,
                 framework_version: str=DEFAULT_FRAMEWORK_VERSION,
                 rerun_on_failure: int=0, keep_workspace: bool=False,
                 post_run_hook: Optional[PostRunHook]=None):
        self.project = project
        self.focal = focal
        self.toolchain = toolchain
        self.framework_version = framework_version
        self.rerun_on_failure = rerun_on_failure
        self.keep_workspace = keep_workspace
        self.post_run_hook = post_run_hook
        self.workspace = None  # type: Optional[Workspace]

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()

    def close(self):
        ws = self.workspace
        if ws is not None and not self.keep_workspace:
            ws.remove()
            self.workspace = None

    def materialize(self, test_source: str) -> Workspace:
        self.workspace = materialize_test(self.project, self.focal, test_source,
                                          self.framework_version, self.workspace)
        return self.workspace

    def compile(self, ws: Workspace) -> List[Diagnostic]:
        r = self.toolchain.compile(ws)
        out = relativize_output(r.output, ws.project_root)
        ws.compile_output = out
        test_file = ws.test_file_rel
        if r.timed_out:
            return [Diagnostic(COMPILE_TIMEOUT, test_file, 0,
                               f"{COMPILE_TIMEOUT:s}\n{out:s}".strip())]
        diags = parse_diagnostics(out, test_file)
        if r.exit_status != 0 and not diags:
            diags = [Diagnostic(UNPARSED, test_file, 0, out.strip() or UNPARSED)]
        return diags

    def execute(self, ws: Workspace) -> Optional[RuntimeFailure]:
        failure = None
        for i in range(1 + self.rerun_on_failure):
            if i:
                logger.warning("re-running failed %s (%d)", ws.test_class, i)
            r = self.toolchain.run_test(ws, ws.test_class)
            if r.timed_out:
                failure = timeout_failure(getattr(self.toolchain, "execute_timeout", 0))
                continue
            failure = parse_runtime_failure(r.output, ws.test_class)
            if failure is None and r.exit_status != 0:
                failure = RuntimeFailure("java.lang.Error",
                                         f"test runner exited with {r.exit_status:d}")
            if failure is None:
                return None
        return failure

    def validate(self, test_source: str) -> Validation:
        """
        syntax check -> materialize -> compile -> execute (if compiled) -> classify
        """
        ws = self.materialize(test_source)
        text = ws.test_text
        try:
            parse_compilation_unit(text)
        except JavaSyntaxError as e:
            diag = Diagnostic(SYNTAX_ERROR, ws.test_file_rel, e.line or 0,
                              f"{SYNTAX_ERROR:s}: {e}")
            return Validation(classify(False, [diag], None), text, ws.test_file_rel)

        diags = self.compile(ws)
        run = None
        if not diags:
            run = self.execute(ws)
        outcome = classify(True, diags, run)
        logger.debug("%s%s: syntax=%s compiled=%s passed=%s errors=%d",
                     self.focal.class_name, GENERATED_TEST_SUFFIX, outcome.syntactic_ok,
                     outcome.compiled, outcome.passed, outcome.error_count)
        res = Validation(outcome, text, ws.test_file_rel)
        if outcome.compiled and self.post_run_hook is not None:
            res = replace(res, post_run=self.run_post_run_hook(ws, res))
        return res

    def run_post_run_hook(self, ws: Workspace, validation: Validation) -> Optional[dict]:
        """
        :note: a failing hook is logged, it does not change the outcome
        """
        try:
            return self.post_run_hook(ws, validation)
        except Exception as e:
            logger.warning("post-run hook failed for %s: %r", ws.test_class, e)
            return None
