from pathlib import PurePath
import unittest

from llmTestGen.corpus.dataPair import ProjectRef
from llmTestGen.diagnostics.codeAnalyzer import UNKNOWN_ELEMENT, BuggyElement, \
    ElementKind, ProjectClassIndex, imports_of, locate_buggy_element, \
    locate_buggy_elements
from llmTestGen.diagnostics.emParser import UNPARSED, Diagnostic
from llmTestGen.errors import PreconditionError
from tests.scriptedBackends import TEXTUTILS

TEST_FILE = PurePath("src/main/java/org/example/xml/XmlWriterGeneratedTest.java")

WRITE_TEST = """\
package org.example.xml;

import org.junit.Test;
import static org.junit.Assert.*;

public class XmlWriterGeneratedTest {

    @Test
    public void testWrite() {
        Xml xml = new Xml("item");
        xml.addAttribute("id", "1");
        XmlReader reader = new XmlReader();
        assertEquals(expected, new XmlWriter().write(xml));
        String s = TextUtils.reverse("a", 1);
    }
}
"""


def diag(line, error_type="cannot find symbol", symbol=None, kind=None, location=None,
         in_test_file=True):
    return Diagnostic(error_type, TEST_FILE, line, "", symbol, kind, location,
                      in_test_file=in_test_file)


class LocateBuggyElement_TC(unittest.TestCase):

    def test_missing_method_points_to_receiver_class(self):
        d = diag(11, symbol="addAttribute", kind="method", location="variable xml of type Xml")
        self.assertEqual(locate_buggy_elements(d, WRITE_TEST),
                         [BuggyElement("Xml", ElementKind.CLASS, "Xml")])

    def test_missing_class(self):
        d = diag(12, symbol="XmlReader", kind="class", location="class XmlWriterGeneratedTest")
        # the class from the message and from "new" on the line are the same element
        self.assertEqual(locate_buggy_elements(d, WRITE_TEST),
                         [BuggyElement("XmlReader", ElementKind.CLASS)])

    def test_variable_and_classes_on_line(self):
        d = diag(13, symbol="expected", kind="variable", location="class XmlWriterGeneratedTest")
        es = locate_buggy_elements(d, WRITE_TEST)
        self.assertEqual(es, [
            BuggyElement("expected", ElementKind.VARIABLE),
            BuggyElement("XmlWriter", ElementKind.CLASS, "XmlWriter"),
        ])
        self.assertEqual(locate_buggy_element(d, WRITE_TEST), es[0])

    def test_static_receiver(self):
        d = diag(14, "method reverse in class TextUtils cannot be applied to given types;")
        self.assertEqual(locate_buggy_elements(d, WRITE_TEST),
                         [BuggyElement("TextUtils", ElementKind.CLASS, "TextUtils")])

    def test_unknown(self):
        self.assertEqual(locate_buggy_elements(diag(0, UNPARSED), WRITE_TEST), [UNKNOWN_ELEMENT])
        self.assertEqual(locate_buggy_elements(diag(100), WRITE_TEST), [UNKNOWN_ELEMENT])
        # a line without any class or symbol
        self.assertEqual(locate_buggy_elements(diag(8, "missing return statement"), WRITE_TEST),
                         [UNKNOWN_ELEMENT])

    def test_imports_of(self):
        self.assertEqual(imports_of(WRITE_TEST),
                         ("org.example.xml", ["org.junit.Test", "org.junit.Assert.*"]))
        self.assertEqual(imports_of("class A {}"), (None, []))

    def test_empty_identifier(self):
        with self.assertRaises(PreconditionError):
            BuggyElement("", ElementKind.CLASS)


class ProjectClassIndex_TC(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.index = ProjectClassIndex(ProjectRef.discover(TEXTUTILS))

    def test_index(self):
        self.assertEqual(len(self.index), 7)
        self.assertEqual([c.class_name for c in self.index.candidates("Node")],
                         ["org.example.text.Node", "org.example.xml.Node"])

    def test_xml_context(self):
        ctx = self.index.lookup("Xml")
        self.assertEqual(ctx.class_name, "org.example.xml.Xml")
        self.assertEqual(ctx.class_declaration, "public class Xml implements Node")
        self.assertEqual(ctx.public_method_signatures, (
            "public Xml(String name)",
            "public String getName()",
            "public Xml setAttribute(String key, String value)",
            "public String getAttribute(String key)",
            "public Map<String, String> getAttributes()",
            "public Xml setText(String text)",
            "public String getText()",
            "public String render()",
        ))

    def test_private_members_are_not_listed(self):
        sigs = self.index.lookup("StrBuilder").public_method_signatures
        self.assertNotIn("private void ensureCapacity(int capacity)", sigs)
        self.assertEqual(self.index.lookup("TextUtils").public_method_signatures, (
            "public static String reverse(String s)",
            "public static boolean isBlank(String s)",
        ))

    def test_interface(self):
        ctx = self.index.lookup("org.example.xml.Node")
        self.assertEqual(ctx.public_method_signatures, ("String render()",))

    def test_resolution_of_same_simple_name(self):
        lookup = self.index.lookup
        self.assertEqual(lookup("Node", WRITE_TEST).class_name, "org.example.xml.Node")
        self.assertEqual(lookup("Node", "package org.example.xml;\nimport org.example.text.Node;\n").class_name,
                         "org.example.text.Node")
        self.assertEqual(lookup("Node", "package a;\nimport org.example.xml.*;\n").class_name,
                         "org.example.xml.Node")
        self.assertEqual(lookup("Node", "").class_name, "org.example.text.Node")
        self.assertIsNone(lookup("XmlReader", WRITE_TEST))

    def test_resolve(self):
        self.assertEqual(self.index.resolve(BuggyElement("expected", ElementKind.VARIABLE)), None)
        ctx = self.index.resolve(BuggyElement("getName", ElementKind.METHOD, "Counter"))
        self.assertEqual(ctx.class_name, "org.example.text.Counter")
        with self.assertRaises(PreconditionError):
            self.index.resolve(UNKNOWN_ELEMENT)

    def test_collect(self):
        ds = [
            diag(11, symbol="addAttribute", kind="method", location="variable xml of type Xml"),
            diag(12, symbol="XmlReader", kind="class", location="class XmlWriterGeneratedTest"),
            diag(13, symbol="expected", kind="variable", location="class XmlWriterGeneratedTest"),
            diag(10, symbol="Xml", kind="class"),
            # errors in other files do not add any context
            diag(14, "method reverse in class TextUtils cannot be applied to given types;",
                 in_test_file=False),
        ]
        ctxs = self.index.collect(ds, WRITE_TEST)
        self.assertEqual([c.class_name for c in ctxs],
                         ["org.example.xml.Xml", "org.example.xml.XmlWriter"])


if __name__ == "__main__":
    unittest.main()
