"""xml2jsp: translate a tag-based pseudo-code XML dialect into JSP pages."""

from .codegen import JspProgram, Translator, emit_program, render_program, translate
from .diagnostics import Diagnostic, Severity
from .options import TranslationOptions
from .pipeline import TranslationResult, translate_path, translate_text, validate_text
from .reader import DocumentReader, EventKind, SourcePosition, XmlEvent, XmlSyntaxError, open_document, read_events
from .schema import Schema, builtin_schema, check_content_pattern, export_xsd, validate_stream
from .statements import BlockTracker, parse_statement, track_block, translate_loop_header
from .symbols import Symbol, SymbolTable, analyze, infer_literal_type, lookup

__version__ = "0.1.0"

__all__ = [
    "BlockTracker",
    "Diagnostic",
    "DocumentReader",
    "EventKind",
    "JspProgram",
    "Schema",
    "Severity",
    "SourcePosition",
    "Symbol",
    "SymbolTable",
    "TranslationOptions",
    "TranslationResult",
    "Translator",
    "XmlEvent",
    "XmlSyntaxError",
    "analyze",
    "builtin_schema",
    "check_content_pattern",
    "emit_program",
    "export_xsd",
    "infer_literal_type",
    "lookup",
    "open_document",
    "parse_statement",
    "read_events",
    "render_program",
    "track_block",
    "translate",
    "translate_loop_header",
    "translate_path",
    "translate_text",
    "validate_stream",
    "validate_text",
]
