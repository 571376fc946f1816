"""Grammar rule, validator and XSD export tests."""

import random
import re
import string
from io import StringIO

from helpers import load, match_identifier_reference
from xsdcheck import XsdValidator

from xml2jsp.reader import read_events
from xml2jsp.schema import (
    ATTRIBUTE_PRESENT,
    ILLEGAL_CHILD,
    MISSING_CHILD,
    OUT_OF_ORDER_CHILD,
    PATTERN_MISMATCH,
    TEXT_WHERE_FORBIDDEN,
    UNKNOWN_TAG,
    Choice,
    IDENTIFIER_PATTERN,
    TextOnly,
    builtin_schema,
    check_content_pattern,
    export_xsd,
    export_xsd_string,
    validate_stream,
)


def validate(source):
    return validate_stream(read_events(source), builtin_schema())


def codes(source):
    return [d.code for d in validate(source)]


# -- builtin rules -------------------------------------------------------------


def test_out_rule_is_unbounded_choice():
    rule = builtin_schema().rule("out")
    assert isinstance(rule.content, Choice)
    assert rule.content.names == frozenset({"write", "writev"})


def test_writev_uses_identifier_pattern():
    rule = builtin_schema().rule("writev")
    assert isinstance(rule.content, TextOnly)
    assert rule.content.pattern == IDENTIFIER_PATTERN
    assert IDENTIFIER_PATTERN == r"\s*_*[A-Za-z][\w_]*\s*"


def test_unknown_tag_has_no_rule():
    assert builtin_schema().rule("bogus") is None


def test_every_child_mentioned_has_a_rule():
    schema = builtin_schema()
    for rule in schema.rules.values():
        content = rule.content
        mentioned = set()
        if isinstance(content, Choice):
            mentioned = set(content.names)
        elif hasattr(content, "items"):
            for item in content.items:
                mentioned |= set(item.names)
        elif hasattr(content, "names"):
            mentioned = set(content.names)
        elif hasattr(content, "required"):
            mentioned = set(content.required) | set(content.optional)
        for name in mentioned:
            assert schema.rule(name) is not None, name


# -- pattern facet --------------------------------------------------------------


def test_identifier_examples():
    assert check_content_pattern(" xx ", IDENTIFIER_PATTERN)
    assert check_content_pattern("_a1", IDENTIFIER_PATTERN)
    assert not check_content_pattern("a b", IDENTIFIER_PATTERN)
    assert not check_content_pattern("9abc", IDENTIFIER_PATTERN)


def test_identifier_pattern_agrees_with_reference_engine():
    # Independent routes: re.fullmatch via check_content_pattern versus a
    # hand-rolled character-walk acceptor.
    rng = random.Random(1234)
    alphabet = string.ascii_letters + string.digits + "_ .-!"
    for _ in range(1000):
        s = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 8)))
        assert check_content_pattern(s, IDENTIFIER_PATTERN) == match_identifier_reference(s), repr(s)


# -- validator ------------------------------------------------------------------


def test_fig3_fragment_validates():
    assert validate(load("fig3_input.xml")) == []


def test_fig6_validates():
    assert validate(load("fig6_input.xml")) == []


def test_illegal_child():
    diags = validate("<root><out><name>x</name></out></root>")
    assert [d.code for d in diags] == [ILLEGAL_CHILD]
    assert diags[0].tag == "name"


def test_pattern_mismatch_on_bad_identifier():
    # Oracle: the facet itself rejects the text.
    assert re.fullmatch(IDENTIFIER_PATTERN, " 9abc ") is None
    diags = validate("<root><writev> 9abc </writev></root>")
    assert [d.code for d in diags] == [PATTERN_MISMATCH]
    assert "9abc" in diags[0].message and "pattern" in diags[0].message


def test_unknown_tag():
    assert codes("<root><bogus>x</bogus></root>") == [UNKNOWN_TAG]


def test_unknown_tag_subtree_not_cascaded():
    assert codes("<root><bogus><write>x</write></bogus></root>") == [UNKNOWN_TAG]


def test_missing_child():
    diags = validate("<root><read> a\n<object>request</object>\n<type>parameter</type>\n</read></root>")
    assert [d.code for d in diags] == [MISSING_CHILD]
    assert "<name>" in diags[0].message


def test_out_of_order_child():
    src = "<root><ps><query> q=\"x\" </query><var> a = 1 </var></ps></root>"
    assert OUT_OF_ORDER_CHILD in codes(src)


def test_db_children_are_order_insensitive():
    src = (
        "<root><dB><url>u</url><conn_name>c</conn_name><driver>d</driver>"
        "<pwd>p</pwd><uid>i</uid></dB></root>"
    )
    assert validate(src) == []


def test_db_missing_required_child():
    src = "<root><dB><driver>d</driver><url>u</url><uid>i</uid><pwd>p</pwd></dB></root>"
    diags = validate(src)
    assert [d.code for d in diags] == [MISSING_CHILD]
    assert "conn_name" in diags[0].message


def test_db_duplicate_child():
    src = (
        "<root><dB><driver>d</driver><driver>d2</driver><url>u</url>"
        "<uid>i</uid><pwd>p</pwd><conn_name>c</conn_name></dB></root>"
    )
    assert ILLEGAL_CHILD in codes(src)


def test_text_where_forbidden():
    assert codes("<root><out>stray<write>x</write></out></root>") == [TEXT_WHERE_FORBIDDEN]


def test_attributes_rejected():
    assert codes('<root><write mode="x">t</write></root>') == [ATTRIBUTE_PRESENT]


def test_wrong_document_element():
    assert ILLEGAL_CHILD in codes("<var> a = 1 </var>")


def test_second_declare_out_of_order():
    src = "<root><declare><var> a = 1 </var></declare><write>x</write><declare><var> b = 2 </var></declare></root>"
    assert OUT_OF_ORDER_CHILD in codes(src)


def test_write_and_var_legal_in_body_and_elsewhere():
    # writev alone is schema-valid; an undeclared name is an analysis fault.
    assert validate("<root><write>x</write><writev> a </writev></root>") == []
    assert validate("<root><var> a = 1 </var><writev> a </writev></root>") == []


def test_determinism():
    src = load("fig6_input.xml")
    assert validate(src) == validate(src)


def test_validator_state_bounded_by_depth():
    # Wide flat document: one element at a time on the frame stack.
    body = "".join("<write>w%d</write>" % i for i in range(2000))
    src = "<root>" + body + "</root>"
    assert validate(src) == []


# -- XSD export --------------------------------------------------------------------


def test_export_one_declaration_per_rule():
    schema = builtin_schema()
    text = export_xsd_string(schema)
    declared = re.findall(r'<xs:element name="([A-Za-z_]+)"', text)
    assert sorted(declared) == sorted(schema.rules)
    assert len(declared) == len(set(declared))


def test_export_out_structure():
    text = export_xsd_string(builtin_schema())
    from xml.etree import ElementTree

    root = ElementTree.fromstring(text)
    ns = "{http://www.w3.org/2001/XMLSchema}"
    out = next(e for e in root.findall(ns + "element") if e.get("name") == "out")
    choice = out.find(ns + "complexType").find(ns + "choice")
    assert choice.get("minOccurs") == "0"
    assert choice.get("maxOccurs") == "unbounded"
    refs = {e.get("ref") for e in choice.findall(ns + "element")}
    assert refs == {"write", "writev"}


def test_export_writev_pattern_matches_facet():
    text = export_xsd_string(builtin_schema())
    assert 'value="%s"' % IDENTIFIER_PATTERN.replace("\\", "\\") in text or IDENTIFIER_PATTERN in text


def test_exported_xsd_accepts_fig6():
    # Independent oracle: generic XSD interpreter over the exported text.
    validator = XsdValidator(export_xsd_string(builtin_schema()))
    assert validator.is_valid(load("fig6_input.xml"))
    assert validator.is_valid(load("fig3_input.xml"))


def test_exported_xsd_rejects_bad_documents():
    validator = XsdValidator(export_xsd_string(builtin_schema()))
    assert not validator.is_valid("<root><out><name>x</name></out></root>")
    assert not validator.is_valid("<root><writev> 9abc </writev></root>")
    assert not validator.is_valid("<root><bogus>x</bogus></root>")


def test_export_sink_writing():
    out = StringIO()
    export_xsd(builtin_schema(), out)
    assert out.getvalue().startswith("<?xml")
