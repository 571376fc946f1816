"""Streaming pull reader for the converter's XML input.

Yields document, element and text events one at a time from a UTF-8 byte
stream.  Memory use is bounded by the deepest element nesting plus the
largest single text node, never by document size.

The accepted syntax is exactly what the tag dialect needs: elements, text,
the five predefined entities plus numeric character references, comments
(skipped, and never splitting a text node) and an optional XML declaration.
Attributes are parsed and carried on the start event so the validator can
reject them; CDATA sections, processing instructions and DOCTYPEs are
rejected outright.
"""

import re
from dataclasses import dataclass
from enum import Enum
from io import BytesIO
from typing import BinaryIO, Iterator

# Well-formedness error codes.
UNEXPECTED_EOF = "UnexpectedEof"
MISMATCHED_CLOSE_TAG = "MismatchedCloseTag"
ILLEGAL_CHARACTER = "IllegalCharacter"
BAD_ENTITY = "BadEntity"
MULTIPLE_ROOTS = "MultipleRoots"
BAD_PROLOG = "BadProlog"

MAX_DEPTH = 256

_CHUNK = 1 << 16
_COMPACT_AT = 1 << 17

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")
_MARKUP_OR_REF = re.compile(r"[<&]")
_BAD_TEXT_CHAR = re.compile(r"[\x00-\x08\x0b\x0c\x0e-\x1f]")
_PROLOG_RE = re.compile(
    r"\s+version\s*=\s*(\"1\.[0-9]+\"|'1\.[0-9]+')"
    r"(\s+encoding\s*=\s*(\"[^\"]*\"|'[^']*'))?"
    r"(\s+standalone\s*=\s*(\"(?:yes|no)\"|'(?:yes|no)'))?\s*"
)

_NAMED_ENTITIES = {"lt": "<", "gt": ">", "amp": "&", "quot": '"', "apos": "'"}


class EventKind(Enum):
    START_DOCUMENT = "StartDocument"
    END_DOCUMENT = "EndDocument"
    START_ELEMENT = "StartElement"
    END_ELEMENT = "EndElement"
    CHARACTERS = "Characters"


@dataclass(frozen=True, slots=True)
class SourcePosition:
    line: int
    column: int
    byte_offset: int


@dataclass(frozen=True, slots=True)
class XmlEvent:
    kind: EventKind
    position: SourcePosition
    name: str | None = None
    text: str | None = None
    attributes: tuple[str, ...] = ()


class XmlSyntaxError(Exception):
    """Raised when the input violates a well-formedness rule."""

    def __init__(self, code: str, position: SourcePosition, detail: str):
        super().__init__(f"{code} at {position.line}:{position.column}: {detail}")
        self.code = code
        self.position = position
        self.detail = detail


class DocumentReader:
    """Single-consumer pull reader over one document.

    Iterating yields XmlEvent values; the first is always StartDocument and
    the last EndDocument.  Raises XmlSyntaxError on malformed input.
    """

    def __init__(self, stream: BinaryIO):
        self._stream = stream
        self._buf = ""
        self._pos = 0
        self._eof = False
        self._line = 1
        self._col = 1
        self._byte = 0
        self._carry = b""
        self._stack: list[str] = []
        self._started = False
        self._finished = False
        self._root_seen = False
        self._prolog_allowed = True
        self._pending: list[XmlEvent] = []

    # -- buffer plumbing ---------------------------------------------------

    def _fill(self) -> bool:
        """Pull one more chunk into the buffer; False once the stream ends."""
        if self._eof:
            return False
        chunk = self._stream.read(_CHUNK)
        if not chunk:
            self._eof = True
            if self._carry:
                raise XmlSyntaxError(ILLEGAL_CHARACTER, self.position(), "truncated UTF-8 sequence")
            return False
        data = self._carry + chunk
        try:
            text = data.decode("utf-8")
            self._carry = b""
        except UnicodeDecodeError as exc:
            if exc.start >= len(data) - 3 and exc.reason.startswith("unexpected end"):
                text = data[: exc.start].decode("utf-8")
                self._carry = data[exc.start:]
            else:
                raise XmlSyntaxError(ILLEGAL_CHARACTER, self.position(), "invalid UTF-8 input") from exc
        if self._pos >= _COMPACT_AT:
            self._buf = self._buf[self._pos:]
            self._pos = 0
        self._buf += text
        return True

    def _have(self, n: int) -> bool:
        while len(self._buf) - self._pos < n:
            if not self._fill():
                return False
        return True

    def _peek(self, n: int = 1) -> str:
        self._have(n)
        return self._buf[self._pos : self._pos + n]

    def _advance(self, n: int) -> str:
        span = self._buf[self._pos : self._pos + n]
        self._pos += n
        nl = span.count("\n")
        if nl:
            self._line += nl
            self._col = n - span.rfind("\n")
        else:
            self._col += n
        self._byte += n if span.isascii() else len(span.encode("utf-8"))
        return span

    def _find(self, pattern: re.Pattern) -> int:
        """Index of the next pattern match, filling as needed; -1 at EOF."""
        start = self._pos
        while True:
            m = pattern.search(self._buf, start)
            if m:
                return m.start()
            start = max(self._pos, len(self._buf))
            if not self._fill():
                return -1

    def _find_str(self, needle: str) -> int:
        start = self._pos
        while True:
            idx = self._buf.find(needle, start)
            if idx >= 0:
                return idx
            start = max(self._pos, len(self._buf) - len(needle) + 1)
            if not self._fill():
                return -1

    def position(self) -> SourcePosition:
        return SourcePosition(self._line, self._col, self._byte)

    def _error(self, code: str, detail: str, position: SourcePosition | None = None):
        raise XmlSyntaxError(code, position or self.position(), detail)

    # -- event production --------------------------------------------------

    def __iter__(self) -> Iterator[XmlEvent]:
        return self

    def __next__(self) -> XmlEvent:
        if self._pending:
            return self._pending.pop(0)
        if self._finished:
            raise StopIteration
        if not self._started:
            self._started = True
            if self._peek(1) == "﻿":
                self._advance(1)
            return XmlEvent(EventKind.START_DOCUMENT, SourcePosition(self._line, self._col, self._byte))
        if self._stack:
            return self._next_in_content()
        return self._next_at_top()

    def next_event(self) -> XmlEvent | None:
        return next(self, None)

    def _next_at_top(self) -> XmlEvent:
        """Before the root element or after it closed."""
        while True:
            self._skip_misc()
            if not self._have(1):
                if not self._root_seen:
                    self._error(UNEXPECTED_EOF, "no root element")
                self._finished = True
                return XmlEvent(EventKind.END_DOCUMENT, self.position())
            pos = self.position()
            ch = self._peek(2)
            if ch[0] != "<":
                self._error(ILLEGAL_CHARACTER, "text outside the root element", pos)
            if len(ch) > 1 and ch[1] == "/":
                self._error(MISMATCHED_CLOSE_TAG, "close tag without a matching open tag", pos)
            if self._root_seen:
                self._error(MULTIPLE_ROOTS, "second top-level element", pos)
            self._root_seen = True
            return self._parse_start_tag()

    def _next_in_content(self) -> XmlEvent:
        pieces: list[str] = []
        text_pos: SourcePosition | None = None
        while True:
            idx = self._find(_MARKUP_OR_REF)
            if idx < 0:
                self._error(UNEXPECTED_EOF, f"unterminated element <{self._stack[-1]}>")
            if idx > self._pos:
                if text_pos is None:
                    text_pos = self.position()
                pieces.append(self._take_text(idx))
            if self._buf[self._pos] == "&":
                if text_pos is None:
                    text_pos = self.position()
                pieces.append(self._decode_entity())
                continue
            # At '<'.
            if self._peek(4) == "<!--":
                self._skip_comment()
                continue
            text = "".join(pieces)
            if text and text.strip():
                # Emit the pending text; the markup is handled on the next pull.
                return XmlEvent(EventKind.CHARACTERS, text_pos, text=text)
            nxt = self._peek(2)
            if nxt == "</":
                return self._parse_close_tag()
            return self._parse_start_tag()

    def _take_text(self, end: int) -> str:
        span = self._buf[self._pos : end]
        bad = _BAD_TEXT_CHAR.search(span)
        if bad is not None:
            self._advance(bad.start())
            self._error(ILLEGAL_CHARACTER, "control character U+%04X in text" % ord(span[bad.start()]))
        self._advance(end - self._pos)
        return span

    def _skip_misc(self) -> None:
        """Skip whitespace, comments and (at the very start) the prolog."""
        while True:
            while self._have(1) and self._buf[self._pos] in " \t\r\n":
                self._advance(1)
            look = self._peek(4)
            if look == "<!--":
                self._skip_comment()
                continue
            if look.startswith("<?"):
                self._parse_prolog()
                continue
            if look.startswith("<!"):
                self._error(ILLEGAL_CHARACTER, "unsupported markup declaration (DOCTYPE/CDATA)")
            if self._have(1) and not self._buf[self._pos].isspace():
                self._prolog_allowed = False
            return

    def _skip_comment(self) -> None:
        pos = self.position()
        self._advance(4)
        end = self._find_str("-->")
        if end < 0:
            self._error(UNEXPECTED_EOF, "unterminated comment", pos)
        self._advance(end - self._pos + 3)

    def _parse_prolog(self) -> None:
        pos = self.position()
        if self._peek(5) != "<?xml":
            self._error(ILLEGAL_CHARACTER, "processing instructions are not supported", pos)
        if not self._prolog_allowed:
            self._error(BAD_PROLOG, "XML declaration must appear before all other content", pos)
        self._prolog_allowed = False
        self._advance(5)
        end = self._find_str("?>")
        if end < 0:
            self._error(UNEXPECTED_EOF, "unterminated XML declaration", pos)
        body = self._advance(end - self._pos)
        self._advance(2)
        m = _PROLOG_RE.fullmatch(body)
        if m is None:
            self._error(BAD_PROLOG, "malformed XML declaration", pos)
        if m.group(3):
            encoding = m.group(3)[1:-1].strip().lower()
            if encoding not in ("utf-8", "utf8"):
                self._error(BAD_PROLOG, f"unsupported encoding {encoding!r} (only UTF-8 is accepted)", pos)

    def _read_name(self) -> str:
        # Extend the buffer until the name provably ends inside it.
        while True:
            m = _NAME_RE.match(self._buf, self._pos)
            if m is None:
                self._error(ILLEGAL_CHARACTER, "expected a name")
            if m.end() < len(self._buf) or not self._fill():
                break
        name = m.group()
        self._advance(len(name))
        return name

    def _skip_ws(self) -> None:
        while self._have(1) and self._buf[self._pos] in " \t\r\n":
            self._advance(1)

    def _parse_start_tag(self) -> XmlEvent:
        pos = self.position()
        self._advance(1)  # '<'
        if not self._have(1):
            self._error(UNEXPECTED_EOF, "unterminated tag", pos)
        ch = self._buf[self._pos]
        if ch == "!":
            self._error(ILLEGAL_CHARACTER, "unsupported markup declaration (DOCTYPE/CDATA)", pos)
        if ch == "?":
            self._error(ILLEGAL_CHARACTER, "processing instructions are not supported", pos)
        name = self._read_name()
        attributes = self._parse_attributes(pos)
        self._skip_ws()
        look = self._peek(2)
        if look.startswith("/"):
            if look != "/>":
                self._error(ILLEGAL_CHARACTER, "expected '/>'")
            self._advance(2)
            self._pending.append(XmlEvent(EventKind.END_ELEMENT, pos, name=name))
            return XmlEvent(EventKind.START_ELEMENT, pos, name=name, attributes=attributes)
        if not look.startswith(">"):
            self._error(UNEXPECTED_EOF if not look else ILLEGAL_CHARACTER, "unterminated start tag", pos)
        self._advance(1)
        if len(self._stack) >= MAX_DEPTH:
            self._error(ILLEGAL_CHARACTER, f"nesting depth exceeds {MAX_DEPTH}", pos)
        self._stack.append(name)
        return XmlEvent(EventKind.START_ELEMENT, pos, name=name, attributes=attributes)

    def _parse_attributes(self, tag_pos: SourcePosition) -> tuple[str, ...]:
        names: list[str] = []
        while True:
            before = self._pos
            self._skip_ws()
            look = self._peek(1)
            if look in (">", "/") or not look:
                return tuple(names)
            if self._pos == before:
                self._error(ILLEGAL_CHARACTER, "expected whitespace before attribute")
            attr_pos = self.position()
            name = self._read_name()
            self._skip_ws()
            if self._peek(1) != "=":
                self._error(ILLEGAL_CHARACTER, f"attribute {name!r} is missing '='", attr_pos)
            self._advance(1)
            self._skip_ws()
            quote = self._peek(1)
            if quote not in ("'", '"'):
                self._error(ILLEGAL_CHARACTER, f"attribute {name!r} value must be quoted", attr_pos)
            self._advance(1)
            end = self._find_str(quote)
            if end < 0:
                self._error(UNEXPECTED_EOF, "unterminated attribute value", attr_pos)
            self._advance(end - self._pos + 1)
            names.append(name)

    def _parse_close_tag(self) -> XmlEvent:
        pos = self.position()
        self._advance(2)  # '</'
        name = self._read_name()
        self._skip_ws()
        if self._peek(1) != ">":
            self._error(UNEXPECTED_EOF if not self._peek(1) else ILLEGAL_CHARACTER, "unterminated close tag", pos)
        self._advance(1)
        expected = self._stack[-1]
        if name != expected:
            self._error(MISMATCHED_CLOSE_TAG, f"expected </{expected}>, found </{name}>", pos)
        self._stack.pop()
        return XmlEvent(EventKind.END_ELEMENT, pos, name=name)

    def _decode_entity(self) -> str:
        pos = self.position()
        self._have(40)
        end = self._buf.find(";", self._pos + 1, self._pos + 40)
        if end < 0:
            self._error(BAD_ENTITY, "entity reference is missing ';'", pos)
        body = self._buf[self._pos + 1 : end]
        self._advance(end - self._pos + 1)
        if body.startswith("#"):
            digits = body[1:]
            try:
                code = int(digits[1:], 16) if digits[:1] in ("x", "X") else int(digits)
            except ValueError:
                code = -1
            if not (0 <= code <= 0x10FFFF) or (code < 0x20 and code not in (0x9, 0xA, 0xD)):
                self._error(BAD_ENTITY, f"invalid character reference &{body};", pos)
            return chr(code)
        try:
            return _NAMED_ENTITIES[body]
        except KeyError:
            self._error(BAD_ENTITY, f"unknown entity &{body};", pos)


def open_document(source: bytes | str | BinaryIO) -> DocumentReader:
    """Open a document for pull reading.

    Accepts raw bytes, already-decoded text, or a binary file object.
    """
    if isinstance(source, str):
        source = source.encode("utf-8")
    if isinstance(source, (bytes, bytearray)):
        source = BytesIO(source)
    return DocumentReader(source)


def next_event(reader: DocumentReader) -> XmlEvent | None:
    return reader.next_event()


def read_events(source: bytes | str | BinaryIO) -> list[XmlEvent]:
    return list(open_document(source))
