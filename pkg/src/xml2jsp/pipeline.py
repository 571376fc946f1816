"""End-to-end wiring: read, validate, analyze, translate, emit.

Two entry points: translate_text keeps everything in memory and returns
the rendered page; translate_path re-reads the input file once per pass so
memory stays bounded by element size rather than file size, and writes the
output only after a full dry pass proved the translation error-free.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator

from .codegen import DECLARATIONS, Fragment, JspProgram, JspWriter, Translator, render_program, translate
from .diagnostics import Diagnostic, Severity, error, has_errors
from .options import TranslationOptions
from .reader import DocumentReader, XmlEvent, XmlSyntaxError, read_events
from .schema import builtin_schema, validate_stream
from .symbols import analyze

IO_ERROR = "IoError"


@dataclass
class TranslationResult:
    diagnostics: list[Diagnostic]
    program: JspProgram | None = None
    text: str | None = None

    @property
    def ok(self) -> bool:
        return not has_errors(self.diagnostics)


def _syntax_diagnostic(exc: XmlSyntaxError) -> Diagnostic:
    return error(exc.code, exc.position, exc.detail)


def _sorted(diags: list[Diagnostic]) -> list[Diagnostic]:
    return sorted(diags, key=lambda d: (d.position.line, d.position.column, d.position.byte_offset))


def translate_text(source: str | bytes, options: TranslationOptions | None = None) -> TranslationResult:
    """Translate an in-memory document; text is None when errors occurred."""
    options = options or TranslationOptions()
    schema = builtin_schema()
    try:
        events = read_events(source)
    except XmlSyntaxError as exc:
        return TranslationResult([_syntax_diagnostic(exc)])
    diags = validate_stream(iter(events), schema)
    if has_errors(diags):
        return TranslationResult(_sorted(diags))
    table, analysis_diags = analyze(iter(events), schema, options.strict)
    diags += analysis_diags
    if has_errors(diags):
        return TranslationResult(_sorted(diags))
    program, translate_diags = translate(iter(events), table, options)
    diags += translate_diags
    if has_errors(diags):
        return TranslationResult(_sorted(diags))
    return TranslationResult(_sorted(diags), program, render_program(program, options))


def validate_text(source: str | bytes) -> list[Diagnostic]:
    """Well-formedness plus grammar validation only."""
    try:
        events = read_events(source)
    except XmlSyntaxError as exc:
        return [_syntax_diagnostic(exc)]
    return validate_stream(iter(events), builtin_schema())


def _file_events(path: Path) -> Iterator[XmlEvent]:
    with open(path, "rb") as handle:
        yield from DocumentReader(handle)


def translate_path(
    input_path: str | Path,
    output_path: str | Path | None = None,
    options: TranslationOptions | None = None,
) -> tuple[list[Diagnostic], bool]:
    """Translate a file, streaming every pass; returns (diagnostics, wrote).

    The input file is never modified.  No output file is created when any
    error diagnostic occurs or when options.check_only is set.
    """
    options = options or TranslationOptions()
    input_path = Path(input_path)
    schema = builtin_schema()
    opener: Callable[[], Iterator[XmlEvent]] = lambda: _file_events(input_path)

    try:
        diags = validate_stream(opener(), schema)
        if has_errors(diags):
            return _sorted(diags), False
        table, analysis_diags = analyze(opener(), schema, options.strict)
        diags += analysis_diags
        if has_errors(diags):
            return _sorted(diags), False
        # Dry pass: collects declarations and surfaces every handler fault.
        dry = Translator(table, options)
        declarations: list[Fragment] = []
        for section, fragment in dry.fragments(opener()):
            if section == DECLARATIONS:
                declarations.append(fragment)
        diags += dry.diagnostics
        if has_errors(diags) or options.check_only:
            return _sorted(diags), False
        if output_path is None:
            return _sorted(diags), False
        with open(output_path, "w", encoding="utf-8") as out:
            writer = JspWriter(out, options)
            writer.declarations(declarations)
            emitter = Translator(table, options)
            for section, fragment in emitter.fragments(opener()):
                if section != DECLARATIONS:
                    writer.body(fragment)
            writer.finish()
        return _sorted(diags), True
    except XmlSyntaxError as exc:
        return [_syntax_diagnostic(exc)], False
