"""Grammar of the tag dialect and the streaming validator for it.

The rule set mirrors the dialect's schema definition: which tags exist,
where each may nest, child ordering and cardinality, and the anchored
pattern each text-bearing tag must satisfy.  Patterns are written in the
common subset of Python and XSD regular expression syntax so the same
strings drive both validate_stream and the exported XSD document.
"""

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator
from xml.etree import ElementTree

from .diagnostics import Diagnostic, error
from .reader import EventKind, SourcePosition, XmlEvent

# Diagnostic codes produced here.
UNKNOWN_TAG = "UnknownTag"
ILLEGAL_CHILD = "IllegalChild"
MISSING_CHILD = "MissingChild"
OUT_OF_ORDER_CHILD = "OutOfOrderChild"
PATTERN_MISMATCH = "PatternMismatch"
TEXT_WHERE_FORBIDDEN = "TextWhereForbidden"
ATTRIBUTE_PRESENT = "AttributePresent"

REQUIRED = "required"
OPTIONAL = "optional"
ZERO_OR_MORE = "zero-or-more"

ANY_BODY = "any-body"

# Identifier facet applied to every variable-like position.
IDENTIFIER_PATTERN = r"\s*_*[A-Za-z][\w_]*\s*"

_NONEMPTY = r"\s*\S[\s\S]*"
_ANY_TEXT = r"[\s\S]*"


def _ci(word: str) -> str:
    """Case-insensitive spelling of a keyword, portable to XSD patterns."""
    return "".join("[%s%s]" % (c.upper(), c.lower()) if c.isalpha() else c for c in word)


_SETTER_KEYWORDS = r"(int|integer|double|real|string)"

VAR_PATTERN = r"\s*_*[A-Za-z][\w_]*\s*=\s*\S[\s\S]*"
ARRAY_PATTERN = r"\s*(integer|real|string)\s+_*[A-Za-z][\w_]*\s*\[\s*[0-9]+\s*\]\s*"
OBJECT_PATTERN = r"\s*(%s|%s)\s*" % (_ci("request"), _ci("session"))
TYPE_PATTERN = r"\s*(%s|%s)\s*" % (_ci("parameter"), _ci("attribute"))
QUERY_PATTERN = r"\s*_*[A-Za-z][\w_]*\s*=\s*\"[\s\S]*\"\s*"
SET_PATTERN = (
    r"(\s*%s\s*\(\s*[0-9]+\s*,[\s\S]+\)\s*)|(\s*_*[A-Za-z][\w_]*\s*=\s*\S[\s\S]*)" % _SETTER_KEYWORDS
)
GET_PATTERN = r"\s*_*[A-Za-z][\w_]*\s*=\s*%s\s*\(\s*[0-9]+\s*\)\s*" % _SETTER_KEYWORDS
HEADER_PATTERN = r"\s*[A-Za-z_][\w_]*\s+_*[A-Za-z][\w_]*\s*\([\s\S]*\)\s*"
CLASS_PATTERN = r"\s*[A-Za-z_][\w_.]*\s+_*[A-Za-z][\w_]*\s*"
PNAME_PATTERN = r"\s*_*[A-Za-z][\w_]*\s*=\s*\S[\s\S]*"


@dataclass(frozen=True)
class TextOnly:
    pattern: str


@dataclass(frozen=True)
class SequenceItem:
    names: frozenset[str]
    cardinality: str


@dataclass(frozen=True)
class Sequence:
    items: tuple[SequenceItem, ...]
    lead_text_pattern: str | None = None


@dataclass(frozen=True)
class Choice:
    names: frozenset[str]


@dataclass(frozen=True)
class AllGroup:
    required: frozenset[str]
    optional: frozenset[str]


@dataclass(frozen=True)
class Mixed:
    text_pattern: str
    names: frozenset[str]


ContentModel = TextOnly | Sequence | Choice | AllGroup | Mixed


@dataclass(frozen=True)
class TagRule:
    tag_name: str
    allowed_parents: frozenset[str]
    content: ContentModel


@dataclass(frozen=True)
class Schema:
    rules: dict[str, TagRule]
    root_tag: str = "root"
    identifier_pattern: str = IDENTIFIER_PATTERN

    # Parents that count as "any-body" for nesting checks.
    body_contexts: frozenset[str] = frozenset({"root", "function"})

    def rule(self, name: str) -> TagRule | None:
        return self.rules.get(name)

    def parent_allows(self, parent: str, child_rule: TagRule) -> bool:
        allowed = child_rule.allowed_parents
        return parent in allowed or (ANY_BODY in allowed and parent in self.body_contexts)


BODY_TAGS = frozenset(
    {
        "s",
        "out",
        "write",
        "writev",
        "read",
        "var",
        "dB",
        "ps",
        "function",
        "class",
        "redirect",
        "include",
        "forward",
        "session",
    }
)

FUNCTION_BODY_TAGS = frozenset({"var", "out", "write", "writev", "s", "class"})


def _seq(*items: tuple[Iterable[str] | str, str], lead: str | None = None) -> Sequence:
    built = []
    for names, card in items:
        if isinstance(names, str):
            names = (names,)
        built.append(SequenceItem(frozenset(names), card))
    return Sequence(tuple(built), lead_text_pattern=lead)


@lru_cache(maxsize=1)
def builtin_schema() -> Schema:
    """The compiled-in rule set for the whole tag dialect."""
    rules: dict[str, TagRule] = {}

    def rule(name: str, parents: Iterable[str], content: ContentModel) -> None:
        rules[name] = TagRule(name, frozenset(parents), content)

    rule("root", (), _seq(("declare", OPTIONAL), (BODY_TAGS, ZERO_OR_MORE)))
    rule("declare", ("root",), Choice(frozenset({"var", "array"})))
    rule("var", ("declare", ANY_BODY, "ps"), TextOnly(VAR_PATTERN))
    rule("array", ("declare",), TextOnly(ARRAY_PATTERN))

    rule("read", ("root", "ps"), _seq(("object", REQUIRED), ("type", REQUIRED), ("name", REQUIRED), lead=IDENTIFIER_PATTERN))
    rule("object", ("read",), TextOnly(OBJECT_PATTERN))
    rule("type", ("read",), TextOnly(TYPE_PATTERN))
    rule("name", ("read",), TextOnly(_NONEMPTY))

    rule("out", (ANY_BODY,), Choice(frozenset({"write", "writev"})))
    rule("write", ("out", ANY_BODY), TextOnly(_ANY_TEXT))
    rule("writev", ("out", ANY_BODY), TextOnly(IDENTIFIER_PATTERN))

    rule("dB", ("root",), AllGroup(frozenset({"driver", "url", "uid", "pwd", "conn_name"}), frozenset({"excep_msg"})))
    rule("driver", ("dB",), TextOnly(_NONEMPTY))
    rule("url", ("dB",), TextOnly(_NONEMPTY))
    rule("uid", ("dB",), TextOnly(_NONEMPTY))
    rule("pwd", ("dB",), TextOnly(_NONEMPTY))
    rule("conn_name", ("dB",), TextOnly(IDENTIFIER_PATTERN))
    rule("excep_msg", ("dB",), TextOnly(_ANY_TEXT))

    rule("s", (ANY_BODY,), TextOnly(_NONEMPTY))

    rule("function", ("root",), _seq(("header", REQUIRED), (FUNCTION_BODY_TAGS, ZERO_OR_MORE)))
    rule("header", ("function",), TextOnly(HEADER_PATTERN))

    rule(
        "ps",
        ("root",),
        _seq(
            ("var", ZERO_OR_MORE),
            ("query", REQUIRED),
            (("read", "set"), ZERO_OR_MORE),
            ("result", OPTIONAL),
            ("get", ZERO_OR_MORE),
        ),
    )
    rule("query", ("ps",), TextOnly(QUERY_PATTERN))
    rule("set", ("ps", "session"), TextOnly(SET_PATTERN))
    rule("result", ("ps",), TextOnly(IDENTIFIER_PATTERN))
    rule("get", ("ps",), TextOnly(GET_PATTERN))

    rule("class", (ANY_BODY,), Mixed(CLASS_PATTERN, frozenset({"pname"})))
    rule("pname", ("class", "forward"), TextOnly(PNAME_PATTERN))

    rule("redirect", ("root",), TextOnly(_NONEMPTY))
    rule("include", ("root",), TextOnly(_NONEMPTY))
    rule("forward", ("root",), Mixed(_NONEMPTY, frozenset({"pname"})))
    rule("session", ("root",), Choice(frozenset({"set"})))

    return Schema(rules=rules)


@lru_cache(maxsize=256)
def _compiled(pattern: str) -> re.Pattern:
    return re.compile(pattern)


def check_content_pattern(text: str, pattern: str) -> bool:
    """Anchored match of the whole text, as schema facets require."""
    return _compiled(pattern).fullmatch(text) is not None


class _Frame:
    __slots__ = ("name", "rule", "position", "checked", "seq_index", "seq_counts", "seen", "text", "had_child")

    def __init__(self, name: str, rule: TagRule | None, position: SourcePosition, checked: bool):
        self.name = name
        self.rule = rule
        self.position = position
        self.checked = checked  # False suppresses checks inside faulty subtrees
        self.seq_index = 0
        self.seq_counts: list[int] | None = None
        if rule is not None and isinstance(rule.content, Sequence):
            self.seq_counts = [0] * len(rule.content.items)
        self.seen: dict[str, int] = {}
        self.text: list[str] = []
        self.had_child = False


def validate_stream(events: Iterable[XmlEvent], schema: Schema) -> list[Diagnostic]:
    """Single streaming pass over well-formed events; state is O(depth).

    Returns all rule violations in document order; an empty list means the
    document conforms.
    """
    diags: list[Diagnostic] = []
    stack: list[_Frame] = []

    for event in events:
        if event.kind is EventKind.START_ELEMENT:
            name = event.name
            if event.attributes:
                diags.append(
                    error(
                        ATTRIBUTE_PRESENT,
                        event.position,
                        "attributes are not part of the dialect: %s" % ", ".join(event.attributes),
                        tag=name,
                    )
                )
            if not stack:
                rule = schema.rule(name)
                if name != schema.root_tag:
                    diags.append(
                        error(ILLEGAL_CHILD, event.position, f"document element must be <{schema.root_tag}>, found <{name}>", tag=name)
                    )
                    stack.append(_Frame(name, None, event.position, checked=False))
                else:
                    stack.append(_Frame(name, rule, event.position, checked=True))
                continue
            parent = stack[-1]
            if not parent.checked:
                stack.append(_Frame(name, None, event.position, checked=False))
                continue
            parent.had_child = True
            rule = schema.rule(name)
            if rule is None:
                diags.append(error(UNKNOWN_TAG, event.position, f"unknown tag <{name}>", tag=name))
                stack.append(_Frame(name, None, event.position, checked=False))
                continue
            if not schema.parent_allows(parent.name, rule):
                diags.append(
                    error(ILLEGAL_CHILD, event.position, f"<{name}> is not allowed inside <{parent.name}>", tag=name)
                )
                stack.append(_Frame(name, None, event.position, checked=False))
                continue
            _check_child(parent, name, event.position, diags)
            stack.append(_Frame(name, rule, event.position, checked=True))

        elif event.kind is EventKind.CHARACTERS:
            if not stack:
                continue
            frame = stack[-1]
            if not frame.checked or frame.rule is None:
                continue
            model = frame.rule.content
            if isinstance(model, (TextOnly, Mixed)):
                frame.text.append(event.text)
            elif isinstance(model, Sequence) and model.lead_text_pattern is not None and not frame.had_child:
                frame.text.append(event.text)
            elif event.text.strip():
                diags.append(
                    error(TEXT_WHERE_FORBIDDEN, event.position, f"<{frame.name}> does not allow text content", tag=frame.name)
                )

        elif event.kind is EventKind.END_ELEMENT:
            frame = stack.pop()
            if frame.checked and frame.rule is not None:
                _finish_frame(frame, diags)

    return diags


def _check_child(parent: _Frame, child: str, position: SourcePosition, diags: list[Diagnostic]) -> None:
    model = parent.rule.content
    if isinstance(model, TextOnly):
        diags.append(error(ILLEGAL_CHILD, position, f"<{parent.name}> allows only text content", tag=child))
    elif isinstance(model, (Choice, Mixed)):
        if child not in model.names:
            diags.append(error(ILLEGAL_CHILD, position, f"<{child}> is not allowed inside <{parent.name}>", tag=child))
    elif isinstance(model, AllGroup):
        if child not in model.required and child not in model.optional:
            diags.append(error(ILLEGAL_CHILD, position, f"<{child}> is not allowed inside <{parent.name}>", tag=child))
        elif child in parent.seen:
            diags.append(error(ILLEGAL_CHILD, position, f"<{child}> appears more than once in <{parent.name}>", tag=child))
        parent.seen[child] = parent.seen.get(child, 0) + 1
    elif isinstance(model, Sequence):
        items = model.items
        counts = parent.seq_counts
        j = parent.seq_index
        while j < len(items):
            item = items[j]
            if child in item.names and (item.cardinality == ZERO_OR_MORE or counts[j] == 0):
                break
            j += 1
        if j == len(items):
            if any(child in item.names for item in items[: parent.seq_index + 1]):
                diags.append(
                    error(OUT_OF_ORDER_CHILD, position, f"<{child}> appears out of order inside <{parent.name}>", tag=child)
                )
                for k, item in enumerate(items):
                    if child in item.names:
                        counts[k] += 1
                        break
            else:
                diags.append(error(ILLEGAL_CHILD, position, f"<{child}> is not allowed inside <{parent.name}>", tag=child))
        else:
            counts[j] += 1
            parent.seq_index = j


def _finish_frame(frame: _Frame, diags: list[Diagnostic]) -> None:
    model = frame.rule.content
    text = "".join(frame.text)
    if isinstance(model, TextOnly):
        if not check_content_pattern(text, model.pattern):
            diags.append(
                error(
                    PATTERN_MISMATCH,
                    frame.position,
                    "text %r in <%s> does not match pattern %r" % (text, frame.name, model.pattern),
                    tag=frame.name,
                )
            )
    elif isinstance(model, Mixed):
        if not check_content_pattern(text, model.text_pattern):
            diags.append(
                error(
                    PATTERN_MISMATCH,
                    frame.position,
                    "text %r in <%s> does not match pattern %r" % (text, frame.name, model.text_pattern),
                    tag=frame.name,
                )
            )
    elif isinstance(model, AllGroup):
        for name in sorted(model.required):
            if name not in frame.seen:
                diags.append(
                    error(MISSING_CHILD, frame.position, f"<{frame.name}> is missing required child <{name}>", tag=frame.name)
                )
    elif isinstance(model, Sequence):
        if model.lead_text_pattern is not None and not check_content_pattern(text, model.lead_text_pattern):
            diags.append(
                error(
                    PATTERN_MISMATCH,
                    frame.position,
                    "text %r in <%s> does not match pattern %r" % (text, frame.name, model.lead_text_pattern),
                    tag=frame.name,
                )
            )
        for j, item in enumerate(model.items):
            if item.cardinality == REQUIRED and frame.seq_counts[j] == 0:
                missing = "/".join(sorted(item.names))
                diags.append(
                    error(MISSING_CHILD, frame.position, f"<{frame.name}> is missing required child <{missing}>", tag=frame.name)
                )


# -- XSD export -------------------------------------------------------------

_XS = "http://www.w3.org/2001/XMLSchema"


def _xs(tag: str) -> str:
    return "{%s}%s" % (_XS, tag)


def _occurs(el: ElementTree.Element, cardinality: str) -> None:
    if cardinality == OPTIONAL:
        el.set("minOccurs", "0")
    elif cardinality == ZERO_OR_MORE:
        el.set("minOccurs", "0")
        el.set("maxOccurs", "unbounded")


def export_xsd(schema: Schema, sink) -> None:
    """Write an XSD 1.0 document equivalent to the compiled-in rules.

    Every tag becomes exactly one global element declaration; parents refer
    to children by reference.  Known approximations: XSD mixed content
    cannot carry a text facet, and XSD treats every global element as an
    acceptable document root.
    """
    ElementTree.register_namespace("xs", _XS)
    root = ElementTree.Element(_xs("schema"))
    order = [schema.root_tag] + sorted(n for n in schema.rules if n != schema.root_tag)
    for name in order:
        rule = schema.rules[name]
        el = ElementTree.SubElement(root, _xs("element"), name=name)
        _append_content(el, rule.content)
    tree = ElementTree.ElementTree(root)
    ElementTree.indent(tree)
    tree.write(sink, encoding="unicode", xml_declaration=True)
    sink.write("\n")


def export_xsd_string(schema: Schema) -> str:
    from io import StringIO

    out = StringIO()
    export_xsd(schema, out)
    return out.getvalue()


def _append_content(el: ElementTree.Element, model: ContentModel) -> None:
    if isinstance(model, TextOnly):
        simple = ElementTree.SubElement(el, _xs("simpleType"))
        restriction = ElementTree.SubElement(simple, _xs("restriction"), base="xs:string")
        ElementTree.SubElement(restriction, _xs("pattern"), value=model.pattern)
        return
    complex_type = ElementTree.SubElement(el, _xs("complexType"))
    if isinstance(model, Mixed):
        complex_type.set("mixed", "true")
        choice = ElementTree.SubElement(complex_type, _xs("choice"))
        choice.set("minOccurs", "0")
        choice.set("maxOccurs", "unbounded")
        for name in sorted(model.names):
            ElementTree.SubElement(choice, _xs("element"), ref=name)
    elif isinstance(model, Choice):
        choice = ElementTree.SubElement(complex_type, _xs("choice"))
        choice.set("minOccurs", "0")
        choice.set("maxOccurs", "unbounded")
        for name in sorted(model.names):
            ElementTree.SubElement(choice, _xs("element"), ref=name)
    elif isinstance(model, AllGroup):
        group = ElementTree.SubElement(complex_type, _xs("all"))
        for name in sorted(model.required):
            ElementTree.SubElement(group, _xs("element"), ref=name)
        for name in sorted(model.optional):
            sub = ElementTree.SubElement(group, _xs("element"), ref=name)
            sub.set("minOccurs", "0")
    elif isinstance(model, Sequence):
        if model.lead_text_pattern is not None:
            complex_type.set("mixed", "true")
        seq = ElementTree.SubElement(complex_type, _xs("sequence"))
        for item in model.items:
            if len(item.names) == 1:
                sub = ElementTree.SubElement(seq, _xs("element"), ref=next(iter(item.names)))
                _occurs(sub, item.cardinality)
            else:
                choice = ElementTree.SubElement(seq, _xs("choice"))
                _occurs(choice, item.cardinality)
                for name in sorted(item.names):
                    ElementTree.SubElement(choice, _xs("element"), ref=name)
