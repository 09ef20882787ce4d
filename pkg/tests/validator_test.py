import os
from pathlib import PurePath
import shutil
import unittest

from llmTestGen.constants import JUNIT4, JUNIT5
from llmTestGen.corpus.corpusExtractor import CorpusExtractor
from llmTestGen.corpus.dataPair import ProjectRef
from llmTestGen.diagnostics.emParser import Diagnostic
from llmTestGen.errors import PreconditionError
from llmTestGen.utils import hash_tree
from llmTestGen.validation.junitOutput import EXECUTION_TIMEOUT, RuntimeFailure, \
    parse_runtime_failure, timeout_failure
from llmTestGen.validation.toolchain import JavacToolchain, ToolchainResult
from llmTestGen.validation.validator import SYNTAX_ERROR, OutcomeClass, Validator, \
    check_syntax, classify
from llmTestGen.validation.workspace import materialize_test, render_test_class
from tests.scriptedBackends import FIXTURES, TEXTUTILS, ScriptedToolchain, \
    copy_fixture_project

RUNTIME = FIXTURES / "runtime"

BARE_WRITE_TEST = """\
import java.util.Map;

@Test
public void testWrite() {
    Xml xml = new Xml("item");
    xml.addAttribute("id", "1");
}"""

FULL_COUNTER_TEST = """\
import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class CounterGeneratedTest {
    @Test
    public void testIncrement() {
        assertEquals(1, new Counter("a").increment());
    }
}"""

BARE_EXPECTED_TEST = """\
@Test(expected = IndexOutOfBoundsException.class)
public void testSetCharAt() {
    new StrBuilder().setCharAt(3, 'x');
}"""


def pairs_by_id(project: ProjectRef):
    return {p.pair_id: p for p in CorpusExtractor(project).extract_pairs()}


class JunitOutput_TC(unittest.TestCase):

    def _parse(self, name, test_class):
        text = (RUNTIME / name).read_text(encoding="utf-8")
        return parse_runtime_failure(text, test_class)

    def test_junit4_comparison(self):
        f = self._parse("junit4_comparison.txt", "org.example.text.StrBuilderGeneratedTest")
        self.assertEqual(f, RuntimeFailure("org.junit.ComparisonFailure",
                                           "expected:<[J]ava> but was:<[j]ava>", 14))

    def test_junit4_npe(self):
        # the frame of the focal class is not the failing line
        f = self._parse("junit4_npe.txt", "org.example.xml.XmlWriterGeneratedTest")
        self.assertEqual(f, RuntimeFailure("java.lang.NullPointerException", "", 11))

    def test_junit4_ok(self):
        self.assertIsNone(self._parse("junit4_ok.txt", "org.example.text.CounterGeneratedTest"))

    def test_junit5(self):
        f = self._parse("junit5_assertion.txt", "org.example.text.CounterGeneratedTest")
        self.assertEqual(f, RuntimeFailure("org.opentest4j.AssertionFailedError",
                                           "expected: <2> but was: <1>", 13))

    def test_uncaught(self):
        f = self._parse("uncaught.txt", "org.example.text.CounterGeneratedTest")
        self.assertEqual(f.exception_type, "java.lang.NoClassDefFoundError")
        self.assertEqual(f.message, "org/junit/runner/JUnitCore")
        self.assertIsNone(f.failing_line)

    def test_timeout(self):
        f = timeout_failure(60.0)
        self.assertEqual(f.exception_type, EXECUTION_TIMEOUT)
        self.assertEqual(RuntimeFailure.from_record(f.to_record()), f)


class Classify_TC(unittest.TestCase):

    def test_outcomes(self):
        d = Diagnostic("cannot find symbol", PurePath("A.java"), 3, "")
        fail = RuntimeFailure("java.lang.AssertionError")
        self.assertEqual(classify(False, [d], None), OutcomeClass(False, False, False, (d,)))
        self.assertEqual(classify(True, [d], None), OutcomeClass(True, False, False, (d,)))
        self.assertEqual(classify(True, [], fail), OutcomeClass(True, True, False, (), fail))
        self.assertEqual(classify(True, [], None), OutcomeClass(True, True, True))

    def test_run_without_compilation(self):
        d = Diagnostic("cannot find symbol", PurePath("A.java"), 3, "")
        with self.assertRaises(PreconditionError):
            classify(True, [d], RuntimeFailure("java.lang.AssertionError"))

    def test_implications(self):
        with self.assertRaises(PreconditionError):
            OutcomeClass(True, False, True)
        with self.assertRaises(PreconditionError):
            OutcomeClass(False, True, False)
        with self.assertRaises(PreconditionError):
            OutcomeClass(True, True, True, (), RuntimeFailure("java.lang.AssertionError"))

    def test_check_syntax(self):
        self.assertTrue(check_syntax(FULL_COUNTER_TEST))
        self.assertTrue(check_syntax("@Test\npublic void testX() { assertTrue(true); }"))
        self.assertFalse(check_syntax("@Test\npublic void testX() { assertTrue(true) }"))
        self.assertFalse(check_syntax("   "))


class Workspace_TC(unittest.TestCase):

    def test_render_bare_method(self):
        text, name = render_test_class(BARE_WRITE_TEST, "org.example.xml", "XmlWriter", JUNIT4)
        self.assertEqual(name, "XmlWriterGeneratedTest")
        lines = text.split("\n")
        self.assertEqual(lines[:6], [
            "package org.example.xml;",
            "",
            "import org.junit.Test;",
            "import static org.junit.Assert.*;",
            "import java.util.Map;",
            "",
        ])
        self.assertEqual(lines[6], "public class XmlWriterGeneratedTest {")
        self.assertIn("        xml.addAttribute(\"id\", \"1\");", lines)
        self.assertTrue(text.endswith("}\n}\n"))

    def test_render_expected_exception(self):
        text, name = render_test_class(BARE_EXPECTED_TEST, "org.example.text", "StrBuilder", JUNIT4)
        self.assertEqual(name, "StrBuilderGeneratedTest")
        self.assertIn("public class StrBuilderGeneratedTest {", text)
        self.assertIn("    @Test(expected = IndexOutOfBoundsException.class)", text)
        self.assertTrue(check_syntax(BARE_EXPECTED_TEST))

    def test_render_junit5(self):
        text, _ = render_test_class("@Test\nvoid testX() {}", "", "Foo", JUNIT5)
        self.assertTrue(text.startswith("import org.junit.jupiter.api.Test;\n"))

    def test_render_full_class(self):
        text, name = render_test_class(FULL_COUNTER_TEST, "org.example.text", "Counter", JUNIT4)
        self.assertEqual(name, "CounterGeneratedTest")
        self.assertTrue(text.startswith("package org.example.text;\n\nimport org.junit.Test;"))
        # an existing package declaration is kept
        text2, _ = render_test_class(text, "org.example.text", "Counter", JUNIT4)
        self.assertEqual(text2.count("package "), 1)

    def test_render_empty(self):
        with self.assertRaises(PreconditionError):
            render_test_class("\n", "p", "Foo", JUNIT4)

    def test_materialize_leaves_project_untouched(self):
        project = ProjectRef.discover(TEXTUTILS)
        focal = pairs_by_id(project)["XmlWriter.write@14"].focal
        before = hash_tree(project.root_path)
        ws = materialize_test(project, focal, BARE_WRITE_TEST, JUNIT4)
        try:
            self.assertEqual(ws.package, "org.example.xml")
            self.assertEqual(ws.test_class, "org.example.xml.XmlWriterGeneratedTest")
            self.assertEqual(ws.test_file_rel.as_posix(),
                             "src/main/java/org/example/xml/XmlWriterGeneratedTest.java")
            self.assertTrue(ws.test_file.is_file())
            # a renamed class of the next attempt replaces the previous file
            first = ws.test_file
            ws = materialize_test(project, focal, FULL_COUNTER_TEST.replace(
                "CounterGeneratedTest", "OtherTest"), JUNIT4, ws)
            self.assertFalse(first.exists())
            self.assertEqual(ws.test_file.name, "OtherTest.java")
        finally:
            ws.remove()
        self.assertEqual(hash_tree(project.root_path), before)
        self.assertFalse(ws.scratch_root.exists())

    def test_no_overwrite_of_project_class(self):
        project = ProjectRef.discover(TEXTUTILS)
        focal = pairs_by_id(project)["Counter.increment@12"].focal
        ws = materialize_test(project, focal, "public class Counter { }", JUNIT4)
        try:
            self.assertEqual(ws.test_file.name, "CounterGeneratedTest.java")
            src = (ws.focal_dir / "Counter.java").read_text(encoding="utf-8")
            self.assertIn("public int increment()", src)
        finally:
            ws.remove()


class Validator_TC(unittest.TestCase):

    def setUp(self):
        self.project = ProjectRef.discover(TEXTUTILS)
        self.pairs = pairs_by_id(self.project)
        self.toolchain = ScriptedToolchain()

    def _validator(self, pair_id):
        return Validator(self.project, self.pairs[pair_id].focal, self.toolchain, JUNIT4)

    def test_compile_error(self):
        with self._validator("XmlWriter.write@14") as v:
            res = v.validate(BARE_WRITE_TEST)
            o = res.outcome
            self.assertTrue(o.syntactic_ok)
            self.assertFalse(o.compiled)
            self.assertEqual(o.error_count, 1)
            d = o.diagnostics[0]
            self.assertEqual(d.symbol, "addAttribute")
            self.assertEqual(d.location, "variable xml of type Xml")
            self.assertTrue(d.in_test_file)
            # lines of diagnostics refer to the materialized text
            self.assertIn("addAttribute", res.test_text.split("\n")[d.line - 1])
            ws_root = v.workspace.scratch_root
        self.assertFalse(ws_root.exists())

    def test_expected_exception(self):
        with self._validator("StrBuilder.setCharAt@50") as v:
            o = v.validate(BARE_EXPECTED_TEST).outcome
        self.assertTrue(o.syntactic_ok)
        self.assertTrue(o.passed)

    def test_syntax_error(self):
        with self._validator("Counter.increment@12") as v:
            o = v.validate("@Test\npublic void testIncrement() { int x = ; }").outcome
        self.assertFalse(o.syntactic_ok)
        self.assertEqual(o.error_count, 1)
        self.assertEqual(o.diagnostics[0].error_type, SYNTAX_ERROR)
        # the syntax check is not a compilation
        self.assertEqual(self.toolchain.compiled, [])

    def test_pass_and_failure(self):
        with self._validator("Counter.increment@12") as v:
            o = v.validate(FULL_COUNTER_TEST).outcome
            self.assertTrue(o.passed)
            o = v.validate(FULL_COUNTER_TEST.replace("assertEquals(1,", 'assertEquals("WRONG",')).outcome
        self.assertTrue(o.compiled)
        self.assertFalse(o.passed)
        self.assertEqual(o.runtime_failure.exception_type, "org.junit.ComparisonFailure")
        self.assertEqual(o.runtime_failure.failing_line, 9)

    def test_unparsed_compiler_output(self):
        class Broken(ScriptedToolchain):
            def compile(self, ws):
                return ToolchainResult(2, "javac crashed\n")

        with Validator(self.project, self.pairs["Counter.increment@12"].focal, Broken()) as v:
            o = v.validate(FULL_COUNTER_TEST).outcome
        self.assertFalse(o.compiled)
        self.assertEqual(o.diagnostics[0].error_type, "unparsed")

    def test_rerun_on_failure(self):
        toolchain = ScriptedToolchain()
        runs = []
        orig = toolchain.run_test

        def run_test(ws, test_class):
            runs.append(test_class)
            return orig(ws, test_class)

        toolchain.run_test = run_test
        v = Validator(self.project, self.pairs["Counter.increment@12"].focal, toolchain,
                      rerun_on_failure=2)
        with v:
            v.validate(FULL_COUNTER_TEST.replace("assertEquals(1,", 'assertEquals("WRONG",'))
        self.assertEqual(len(runs), 3)

    def test_post_run_hook(self):
        calls = []

        def coverage(ws, validation):
            calls.append(ws.test_class)
            self.assertTrue(ws.test_file.is_file())
            return {"test_class": ws.test_class, "passed": validation.outcome.passed}

        v = Validator(self.project, self.pairs["Counter.increment@12"].focal, self.toolchain,
                      post_run_hook=coverage)
        with v:
            res = v.validate(FULL_COUNTER_TEST)
            self.assertEqual(res.post_run, {"test_class": "org.example.text.CounterGeneratedTest",
                                            "passed": True})
            # not executed, no hook
            res = v.validate("@Test\npublic void testIncrement() { int x = ; }")
            self.assertIsNone(res.post_run)
        self.assertEqual(calls, ["org.example.text.CounterGeneratedTest"])

    def test_failing_post_run_hook(self):
        def broken(ws, validation):
            raise RuntimeError("coverage tool not installed")

        with Validator(self.project, self.pairs["Counter.increment@12"].focal, self.toolchain,
                       post_run_hook=broken) as v:
            res = v.validate(FULL_COUNTER_TEST)
        self.assertTrue(res.outcome.passed)
        self.assertIsNone(res.post_run)


@unittest.skipUnless(shutil.which("javac") and shutil.which("java")
                     and os.environ.get("LLMTESTGEN_CLASSPATH"),
                     "requires javac and LLMTESTGEN_CLASSPATH with the JUnit 4 jars")
class JavacValidator_TC(unittest.TestCase):

    def setUp(self):
        self.project = ProjectRef.discover(copy_fixture_project())
        cp = os.environ["LLMTESTGEN_CLASSPATH"].split(os.pathsep)
        self.toolchain = JavacToolchain(classpath=cp)
        self.pairs = pairs_by_id(self.project)

    def tearDown(self):
        shutil.rmtree(self.project.root_path.parent)

    def test_javac(self):
        v = Validator(self.project, self.pairs["XmlWriter.write@14"].focal, self.toolchain)
        with v:
            o = v.validate(BARE_WRITE_TEST).outcome
            self.assertFalse(o.compiled)
            self.assertEqual([d.symbol for d in o.diagnostics], ["addAttribute"])
            o = v.validate(BARE_WRITE_TEST.replace("addAttribute", "setAttribute")).outcome
            self.assertTrue(o.passed)


if __name__ == "__main__":
    unittest.main()
