import unittest

from llmTestGen.errors import JavaSyntaxError
from llmTestGen.java.javaSource import JavaSource, is_parseable, \
    looks_like_type_declaration, parse_member, simple_type_name, \
    top_level_type_name
from tests.scriptedBackends import TEXTUTILS

STR_BUILDER = TEXTUTILS / "src/main/java/org/example/text/StrBuilder.java"
XML_NODE = TEXTUTILS / "src/main/java/org/example/xml/Node.java"
STR_BUILDER_TEST = TEXTUTILS / "src/test/java/org/example/text/StrBuilderTest.java"


class JavaSource_TC(unittest.TestCase):

    def test_package_and_imports(self):
        src = JavaSource.from_file(STR_BUILDER)
        self.assertEqual(src.package, "org.example.text")
        self.assertEqual(src.imports, ["java.util.Arrays"])

        t = JavaSource("import static org.junit.Assert.*;\nclass A {}\n")
        self.assertEqual(t.package, "")
        self.assertEqual(t.imports, ["static org.junit.Assert.*"])

    def test_declaration_text(self):
        src = JavaSource.from_file(STR_BUILDER)
        t = src.find_type("StrBuilder")
        self.assertEqual(src.declaration_text(t),
                         "public final class StrBuilder implements CharSequence")
        sigs = [src.declaration_text(m) for m in src.methods(t)]
        self.assertIn("public StrBuilder setCharAt(int index, char ch)", sigs)
        self.assertIn("public StrBuilder append(String str, int times)", sigs)
        # annotations are not part of the declaration
        self.assertIn("public int length()", sigs)
        self.assertIn("private void ensureCapacity(int capacity)", sigs)
        self.assertEqual([src.declaration_text(c) for c in src.constructors(t)],
                         ["public StrBuilder()"])

    def test_field_text(self):
        src = JavaSource.from_file(STR_BUILDER)
        t = src.find_type("StrBuilder")
        self.assertEqual([src.field_text(f) for f in src.fields(t)],
                         ["private char[] buffer;", "protected int size;"])

    def test_member_span_and_source(self):
        src = JavaSource.from_file(STR_BUILDER)
        t = src.find_type("StrBuilder")
        by_name = {m.name: m for m in src.methods(t)}
        self.assertEqual(src.member_span(by_name["setCharAt"]), (50, 56))
        self.assertEqual(src.member_span(by_name["length"]), (59, 61))
        body = src.member_source(by_name["length"])
        self.assertEqual(body, "public int length() {\n    return size;\n}")
        self.assertIs(src.find_member(t, "setCharAt", 50), by_name["setCharAt"])
        self.assertIsNone(src.find_member(t, "setCharAt", 51))

    def test_nested_types(self):
        src = JavaSource.from_file(STR_BUILDER_TEST)
        names = [n for n, _ in src.iter_types()]
        self.assertEqual(names, ["StrBuilderTest", "StrBuilderTest.Nested"])
        self.assertIsNotNone(src.find_type("StrBuilderTest.Nested"))
        self.assertIsNone(src.find_type("Nested"))

    def test_interface_member_signature(self):
        src = JavaSource.from_file(XML_NODE)
        t = src.find_type("Node")
        sigs = [src.declaration_text(m) for m in src.methods(t)]
        self.assertEqual(sigs, ["String render()"])

    def test_syntax_error(self):
        with self.assertRaises(JavaSyntaxError):
            JavaSource("class A { void f( }")

    def test_parse_member(self):
        src = parse_member("@Test\npublic void testX() {\n    assertTrue(true);\n}")
        t = src.find_type("LlmTestGenWrapper")
        self.assertEqual([m.name for m in src.methods(t)], ["testX"])
        with self.assertRaises(JavaSyntaxError):
            parse_member("public void testX() {")

    def test_is_parseable(self):
        self.assertTrue(is_parseable("class A {}"))
        self.assertTrue(is_parseable("void f() {}"))
        self.assertFalse(is_parseable(""))
        self.assertFalse(is_parseable("Here is the test:"))

    def test_top_level_type(self):
        self.assertTrue(looks_like_type_declaration("public class A { class B {} }"))
        self.assertFalse(looks_like_type_declaration("void f() { }"))
        self.assertEqual(top_level_type_name("package p;\npublic class A { class B {} }"), "A")
        self.assertIsNone(top_level_type_name("void f() {}"))

    def test_class_literal_is_not_declaration(self):
        bare = ("@Test(expected = IndexOutOfBoundsException.class)\n"
                "public void testSetCharAt() {\n"
                "    Class<?> c = String.class;\n"
                "    new StrBuilder().setCharAt(3, 'x');\n"
                "}")
        self.assertFalse(looks_like_type_declaration(bare))
        self.assertIsNone(top_level_type_name(bare))
        self.assertTrue(is_parseable(bare))
        full = "@RunWith(JUnit4.class)\npublic class ATest {\n" + bare + "\n}"
        self.assertTrue(looks_like_type_declaration(full))
        self.assertEqual(top_level_type_name(full), "ATest")
        self.assertEqual(top_level_type_name("public @interface Marker {}"), "Marker")

    def test_simple_type_name(self):
        self.assertEqual(simple_type_name("java.util.List<String>[]"), "List[]")
        self.assertEqual(simple_type_name("Map<String, List<Integer>>"), "Map")
        self.assertEqual(simple_type_name("int"), "int")


if __name__ == "__main__":
    unittest.main()
