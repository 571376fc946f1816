"""Command line front end: xml2jsp <input.xml> [options]."""

import argparse
import sys
from pathlib import Path

from .diagnostics import has_errors
from .options import TranslationOptions
from .pipeline import translate_path
from .schema import builtin_schema, export_xsd

SUCCESS_BANNER = "Input validated successfully"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xml2jsp",
        description="Translate a tag-dialect XML file into a JSP page.",
    )
    parser.add_argument("input", help="input XML file")
    parser.add_argument("-o", "--output", help="output JSP path (default: input with a .jsp extension)")
    parser.add_argument("--strict", action="store_true", help="reject undeclared loop indexes and read targets")
    parser.add_argument("--check", action="store_true", help="validate and analyze only; never write any file")
    parser.add_argument("--emit-excep-msg", action="store_true", help="print the dB excep_msg text inside the catch block")
    parser.add_argument("--response-out", action="store_true", help="emit out.println instead of System.out.println")
    parser.add_argument("--emit-imports", action="store_true", help="prepend a page directive importing java.sql.*")
    parser.add_argument("--emit-xsd", metavar="PATH", help="also export the dialect's XSD to PATH")
    return parser


def run(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    options = TranslationOptions(
        strict=args.strict,
        emit_excep_msg=args.emit_excep_msg,
        response_out=args.response_out,
        emit_imports=args.emit_imports,
        check_only=args.check,
    )

    input_path = Path(args.input)
    if not input_path.is_file():
        print(f"xml2jsp: error: cannot read {input_path}", file=sys.stderr)
        return 2

    if args.emit_xsd and not args.check:
        try:
            with open(args.emit_xsd, "w", encoding="utf-8") as sink:
                export_xsd(builtin_schema(), sink)
        except OSError as exc:
            print(f"xml2jsp: error: cannot write XSD: {exc}", file=sys.stderr)
            return 2

    output_path = Path(args.output) if args.output else input_path.with_suffix(".jsp")
    try:
        diagnostics, _wrote = translate_path(input_path, output_path, options)
    except OSError as exc:
        print(f"xml2jsp: error: {exc}", file=sys.stderr)
        return 2

    for diagnostic in diagnostics:
        print(diagnostic.format(str(input_path)), file=sys.stderr)
    if has_errors(diagnostics):
        return 1
    print(SUCCESS_BANNER)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
