from pathlib import PurePath
import unittest

from llmTestGen.corpus.corpusExtractor import CorpusExtractor
from llmTestGen.corpus.dataPair import ProjectRef
from llmTestGen.diagnostics.codeAnalyzer import ClassContext
from llmTestGen.diagnostics.emParser import Diagnostic
from llmTestGen.errors import PreconditionError
from llmTestGen.prompts.promptBuilder import BUGGY_LINE_TAG, Intention, \
    PromptKind, PromptTemplates, Role, annotate_buggy_lines, build_basic_prompt, \
    build_generation_prompt, build_intention_prompt, build_refinement_prompt, \
    render_class_context, render_code_context
from llmTestGen.utils import estimate_tokens
from tests.scriptedBackends import TEXTUTILS

TEST_FILE = PurePath("src/main/java/org/example/xml/XmlWriterGeneratedTest.java")

PREV_TEST = """\
public class XmlWriterGeneratedTest {
    @Test
    public void testWrite() {
        Xml xml = new Xml("item");
        xml.addAttribute("id", "1");
    }
}"""

XML_CONTEXT = ClassContext("org.example.xml.Xml", "public class Xml implements Node", (
    "public Xml(String name)",
    "public Xml setAttribute(String key, String value)",
))


def missing_method(line=5):
    return Diagnostic("cannot find symbol", TEST_FILE, line, "", "addAttribute", "method",
                      "variable xml of type Xml")


class PromptBuilder_TC(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        ex = CorpusExtractor(ProjectRef.discover(TEXTUTILS))
        pairs = {p.pair_id: p for p in ex.extract_pairs()}
        cls.ctx = ex.extract_focal_context(pairs["StrBuilder.setCharAt@50"].focal)

    def test_basic_prompt(self):
        p = build_basic_prompt(self.ctx)
        self.assertEqual(p.kind, PromptKind.BASIC)
        self.assertEqual([m.role for m in p.messages], [Role.SYSTEM, Role.USER])
        self.assertEqual(p.messages[0].content, "You are a professional who writes Java test methods.")
        self.assertTrue(p.user_text.startswith(
            "Please write a test method for the setCharAt based on the given information using JUnit 4."))
        self.assertFalse(p.truncated)
        self.assertGreaterEqual(p.token_estimate, estimate_tokens(p.char_count))
        self.assertEqual(p.template_version, "v1")

    def test_code_context(self):
        cc = render_code_context(self.ctx)
        self.assertTrue(cc.startswith("// Focal method\npublic StrBuilder setCharAt(int index, char ch) {"))
        self.assertIn("// Focal class: StrBuilder\npublic final class StrBuilder implements CharSequence", cc)
        self.assertIn("// Fields\nprivate char[] buffer;\nprotected int size;", cc)
        self.assertIn("\npublic StrBuilder();\n", cc)
        self.assertTrue(cc.endswith("private void ensureCapacity(int capacity);"))

    def test_same_code_context_in_all_prompts(self):
        cc = render_code_context(self.ctx)
        intention = Intention("Replaces the character at the index.")
        for p in (build_basic_prompt(self.ctx),
                  build_intention_prompt(self.ctx),
                  build_generation_prompt(self.ctx, intention)):
            self.assertTrue(p.user_text.endswith("\n\n" + cc), p.kind)

    def test_intention_prompt(self):
        p = build_intention_prompt(self.ctx)
        self.assertEqual(p.kind, PromptKind.INTENTION)
        self.assertTrue(p.user_text.startswith("Please infer the intention of the setCharAt"))
        self.assertNotEqual(p.messages[0].content, build_basic_prompt(self.ctx).messages[0].content)

    def test_generation_prompt(self):
        p = build_generation_prompt(self.ctx, Intention("Replaces the character at the index."))
        self.assertTrue(p.user_text.startswith(
            "// Intention of the focal method\nReplaces the character at the index.\n"
            "// End of intention\n\nPlease write a test method for the setCharAt"))
        with self.assertRaises(PreconditionError):
            build_generation_prompt(self.ctx, "no intention object")
        with self.assertRaises(PreconditionError):
            Intention("  ")

    def test_truncation(self):
        full = build_basic_prompt(self.ctx)
        p = build_basic_prompt(self.ctx, token_budget=full.token_estimate - 10)
        self.assertTrue(p.truncated)
        self.assertLess(p.char_count, full.char_count)
        # signatures are dropped from the end first
        self.assertNotIn("ensureCapacity", p.user_text)
        self.assertIn("// Fields", p.user_text)

        tiny = build_basic_prompt(self.ctx, token_budget=1)
        self.assertTrue(tiny.truncated)
        # the focal method is always kept
        self.assertIn(self.ctx.focal_method_source, tiny.user_text)
        self.assertNotIn("// Fields", tiny.user_text)
        self.assertNotIn("// Method signatures", tiny.user_text)

    def test_same_truncated_code_context(self):
        budget = build_basic_prompt(self.ctx).token_estimate - 10
        intention = Intention("Replaces the character at the index. " * 20)
        prompts = (build_basic_prompt(self.ctx, token_budget=budget),
                   build_intention_prompt(self.ctx, token_budget=budget),
                   build_generation_prompt(self.ctx, intention, token_budget=budget))
        self.assertTrue(all(p.truncated for p in prompts))
        parts = {p.user_text[p.user_text.index("// Focal method"):] for p in prompts}
        self.assertEqual(len(parts), 1)
        self.assertNotIn("ensureCapacity", parts.pop())

    def test_unknown_template_version(self):
        with self.assertRaises(PreconditionError):
            PromptTemplates("v0")


class RefinementPrompt_TC(unittest.TestCase):

    def test_annotate(self):
        d2 = Diagnostic("incompatible types: String cannot be converted to int", TEST_FILE, 4, "")
        other = Diagnostic("class, interface, or enum expected", PurePath("Xml.java"), 5, "",
                           in_test_file=False)
        text, n = annotate_buggy_lines(PREV_TEST, [missing_method(), missing_method(), d2, other])
        self.assertEqual(n, 2)
        lines = text.split("\n")
        self.assertEqual(lines[4], '        xml.addAttribute("id", "1");  // <Buggy line> '
                                   'cannot find symbol method addAttribute')
        self.assertTrue(lines[3].endswith("// <Buggy line> incompatible types: String cannot be converted to int"))
        self.assertEqual(text.count(BUGGY_LINE_TAG), 2)

    def test_refinement_prompt(self):
        p = build_refinement_prompt(PREV_TEST, [missing_method()], [XML_CONTEXT])
        self.assertEqual(p.kind, PromptKind.REFINEMENT)
        self.assertEqual(len(p.messages), 2)
        u = p.user_text
        self.assertEqual(u.count(BUGGY_LINE_TAG), 2)
        self.assertIn("// Xml class\npublic class Xml implements Node {\n"
                      "    public Xml(String name);\n"
                      "    public Xml setAttribute(String key, String value);\n}", u)
        self.assertTrue(u.endswith("return the full corrected test class in a single java code block."))

    def test_refinement_budget(self):
        big = build_refinement_prompt(PREV_TEST, [missing_method()], [XML_CONTEXT])
        p = build_refinement_prompt(PREV_TEST, [missing_method()], [XML_CONTEXT],
                                    token_budget=big.token_estimate - 1)
        self.assertTrue(p.truncated)
        self.assertNotIn("// Xml class", p.user_text)
        self.assertIn("addAttribute", p.user_text)

    def test_refinement_preconditions(self):
        with self.assertRaises(PreconditionError):
            build_refinement_prompt(PREV_TEST, [])
        with self.assertRaises(PreconditionError):
            build_refinement_prompt("", [missing_method()])

    def test_render_class_context(self):
        ctx = ClassContext("p.Empty", "public class Empty", ())
        self.assertEqual(render_class_context(ctx), "// Empty class\npublic class Empty {\n}")


if __name__ == "__main__":
    unittest.main()
