"""Symbol table and the declaration/use analysis pass.

The analysis runs once over the whole document before code generation so
that facts needed ahead of their source position (a variable later filled
by <read> must be declared as an empty String) are known when fragments
are emitted.
"""

import re
from dataclasses import dataclass, field
from typing import Iterable

from . import parsing, statements
from .diagnostics import Diagnostic, error, note
from .nodes import Node, iter_top_level
from .reader import SourcePosition, XmlEvent
from .schema import Schema, builtin_schema

REPEATED_DECL = "RepeatedDecl"
UNDECLARED_VAR = "UndeclaredVar"
UNRECOGNIZED_LITERAL = "UnrecognizedLiteral"
IMPLICIT_LOOP_VAR = "ImplicitLoopVar"
IMPLICIT_READ_TARGET = "ImplicitReadTarget"
MALFORMED_HEADER = "MalformedHeader"

SCOPE_DECLARATIONS = "declarations"
SCOPE_BODY = "body"


def function_scope(name: str) -> str:
    return f"function:{name}"


class DslType:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class IntType(DslType):
    pass


@dataclass(frozen=True, slots=True)
class RealType(DslType):
    pass


@dataclass(frozen=True, slots=True)
class StringType(DslType):
    pass


@dataclass(frozen=True, slots=True)
class ConnectionType(DslType):
    pass


@dataclass(frozen=True, slots=True)
class PreparedStmtType(DslType):
    pass


@dataclass(frozen=True, slots=True)
class ResultCountType(DslType):
    pass


@dataclass(frozen=True, slots=True)
class ArrayOf(DslType):
    element: DslType


@dataclass(frozen=True, slots=True)
class ObjectType(DslType):
    class_name: str


_KEYWORD_DSL_TYPES = {"integer": IntType(), "real": RealType(), "string": StringType()}

_INT_RE = re.compile(r"[+-]?[0-9]+")
_REAL_RE = re.compile(r"[+-]?([0-9]+\.[0-9]*|\.[0-9]+)")
_STRING_RE = re.compile(r'"[\s\S]*"')


class UnrecognizedLiteralError(ValueError):
    pass


def infer_literal_type(text: str) -> DslType:
    """Type of a var initializer: quoted, integer, or decimal literal."""
    t = text.strip()
    if _STRING_RE.fullmatch(t):
        return StringType()
    if _INT_RE.fullmatch(t):
        return IntType()
    if _REAL_RE.fullmatch(t):
        return RealType()
    raise UnrecognizedLiteralError(f"unrecognized literal {t!r}")


@dataclass
class Symbol:
    name: str
    dsl_type: DslType
    declared_at: SourcePosition
    scope: str
    is_read_target: bool = False
    implicit: bool = False


class SymbolTable:
    """Declared names grouped by scope; lookups resolve innermost-first."""

    def __init__(self):
        self.declarations: dict[str, Symbol] = {}
        self.body: dict[str, Symbol] = {}
        self.functions: dict[str, dict[str, Symbol]] = {}

    def lookup(self, name: str, function: str | None = None) -> Symbol | None:
        if function is not None:
            symbol = self.functions.get(function, {}).get(name)
            if symbol is not None:
                return symbol
        return self.body.get(name) or self.declarations.get(name)

    def all_symbols(self) -> Iterable[Symbol]:
        yield from self.declarations.values()
        yield from self.body.values()
        for scope in self.functions.values():
            yield from scope.values()


def lookup(table: SymbolTable, name: str, function: str | None = None) -> Symbol | None:
    return table.lookup(name, function=function)


class ScopeCursor:
    """Walk-local resolution state; the table itself stays shared."""

    def __init__(self, table: SymbolTable):
        self.table = table
        self.function: str | None = None

    def enter_function(self, name: str) -> None:
        self.table.functions.setdefault(name, {})
        self.function = name

    def leave_function(self) -> None:
        self.function = None

    def lookup(self, name: str) -> Symbol | None:
        return self.table.lookup(name, function=self.function)

    def scope_key(self) -> str:
        return function_scope(self.function) if self.function else SCOPE_BODY

    def declare(self, name: str, dsl_type: DslType, position: SourcePosition, *, declarations: bool = False, is_read_target: bool = False, implicit: bool = False) -> tuple[Symbol, Symbol | None]:
        """Insert a symbol; returns (symbol, previous one in the same scope)."""
        if declarations:
            scope_map, key = self.table.declarations, SCOPE_DECLARATIONS
        elif self.function is not None:
            scope_map, key = self.table.functions[self.function], function_scope(self.function)
        else:
            scope_map, key = self.table.body, SCOPE_BODY
        existing = scope_map.get(name)
        symbol = Symbol(name, dsl_type, position, key, is_read_target, implicit)
        if existing is None:
            scope_map[name] = symbol
        return symbol, existing


class _Analysis:
    def __init__(self, schema: Schema, strict: bool):
        self.schema = schema
        self.strict = strict
        self.table = SymbolTable()
        self.cursor = ScopeCursor(self.table)
        self.diags: list[Diagnostic] = []

    def run(self, events: Iterable[XmlEvent]) -> None:
        for node in iter_top_level(events):
            self.visit(node, in_declare=False)

    def visit(self, node: Node, in_declare: bool) -> None:
        handler = getattr(self, "_visit_" + node.name, None) if node.name.isidentifier() else None
        if node.name == "dB":
            handler = self._visit_db
        if handler is not None:
            handler(node, in_declare)

    # -- declarations -------------------------------------------------------

    def _visit_declare(self, node: Node, in_declare: bool) -> None:
        for child in node.children:
            self.visit(child, in_declare=True)

    def _visit_var(self, node: Node, in_declare: bool) -> None:
        binding = parsing.split_binding(node.text)
        if binding is None:
            self.diags.append(error(UNRECOGNIZED_LITERAL, node.position, f"malformed variable binding {node.text.strip()!r}", tag="var"))
            return
        name, value = binding
        try:
            dsl_type = infer_literal_type(value)
        except UnrecognizedLiteralError as exc:
            self.diags.append(error(UNRECOGNIZED_LITERAL, node.position, str(exc), tag="var"))
            return
        self._declare(name, dsl_type, node.position, declarations=in_declare)

    def _visit_array(self, node: Node, in_declare: bool) -> None:
        parsed = parsing.parse_array_decl(node.text)
        if parsed is None:
            self.diags.append(error(UNRECOGNIZED_LITERAL, node.position, f"malformed array declaration {node.text.strip()!r}", tag="array"))
            return
        keyword, name, _size = parsed
        self._declare(name, ArrayOf(_KEYWORD_DSL_TYPES[keyword]), node.position, declarations=in_declare)

    def _declare(self, name: str, dsl_type: DslType, position: SourcePosition, *, declarations: bool = False, is_read_target: bool = False, implicit: bool = False) -> None:
        _, existing = self.cursor.declare(
            name, dsl_type, position, declarations=declarations, is_read_target=is_read_target, implicit=implicit
        )
        if existing is not None:
            self.diags.append(
                error(
                    REPEATED_DECL,
                    position,
                    f"{name!r} is already declared in this scope (first declared at line {existing.declared_at.line})",
                )
            )

    # -- uses ---------------------------------------------------------------

    def _require(self, name: str, position: SourcePosition, what: str) -> Symbol | None:
        symbol = self.cursor.lookup(name)
        if symbol is None:
            self.diags.append(error(UNDECLARED_VAR, position, f"{what} {name!r} is not declared"))
        return symbol

    def _check_expression(self, text: str, position: SourcePosition) -> None:
        for ident in parsing.identifiers_in(text):
            self._require(ident, position, "identifier")

    def _visit_writev(self, node: Node, in_declare: bool) -> None:
        self._require(node.text.strip(), node.position, "variable")

    def _visit_out(self, node: Node, in_declare: bool) -> None:
        for child in node.children:
            if child.name == "writev":
                self._visit_writev(child, in_declare)

    def _visit_read(self, node: Node, in_declare: bool) -> None:
        target = node.text.strip()
        if not target:
            return
        symbol = self.cursor.lookup(target)
        if symbol is not None:
            symbol.is_read_target = True
            symbol.dsl_type = StringType()
            return
        if self.strict:
            self.diags.append(error(UNDECLARED_VAR, node.position, f"read target {target!r} is not declared"))
            return
        self._declare(target, StringType(), node.position, is_read_target=True, implicit=True)
        self.diags.append(note(IMPLICIT_READ_TARGET, node.position, f"read target {target!r} declared implicitly as an empty String"))

    def _visit_s(self, node: Node, in_declare: bool) -> None:
        try:
            statement = statements.parse_statement(node.text)
        except statements.MalformedStatementError as exc:
            self.diags.append(error(statements.MALFORMED_STATEMENT, node.position, str(exc), tag="s"))
            return
        if isinstance(statement, statements.If):
            self._check_expression(statement.condition, node.position)
        elif isinstance(statement, statements.Loop):
            header = statement.header
            if self.cursor.lookup(header.index) is None:
                if self.strict:
                    self.diags.append(error(UNDECLARED_VAR, node.position, f"loop index {header.index!r} is not declared"))
                else:
                    self._declare(header.index, IntType(), node.position, implicit=True)
                    self.diags.append(note(IMPLICIT_LOOP_VAR, node.position, f"loop index {header.index!r} declared implicitly as int"))
            self._check_expression(header.start, node.position)
            self._check_expression(header.bound, node.position)
            self._check_expression(header.step, node.position)

    def _visit_db(self, node: Node, in_declare: bool) -> None:
        conn = node.find("conn_name")
        if conn is not None and conn.text.strip():
            self._declare(conn.text.strip(), ConnectionType(), conn.position)

    def _visit_ps(self, node: Node, in_declare: bool) -> None:
        for child in node.children:
            if child.name == "var":
                self._visit_var(child, in_declare=False)
            elif child.name == "read":
                self._visit_read(child, in_declare=False)
            elif child.name == "set":
                parsed = parsing.parse_setter(child.text)
                if parsed is not None:
                    _, _, arg = parsed
                    if parsing.IDENTIFIER_RE.fullmatch(arg):
                        self._require(arg, child.position, "setter argument")
            elif child.name == "result":
                name = child.text.strip()
                if name:
                    self._declare(name, ResultCountType(), child.position)

    def _visit_class(self, node: Node, in_declare: bool) -> None:
        parsed = parsing.parse_class_decl(node.text)
        if parsed is None:
            return
        class_name, obj = parsed
        self._declare(obj, ObjectType(class_name), node.position)

    def _visit_function(self, node: Node, in_declare: bool) -> None:
        header_node = node.find("header")
        header = parsing.parse_function_header(header_node.text) if header_node is not None else None
        if header is None:
            position = header_node.position if header_node is not None else node.position
            self.diags.append(error(MALFORMED_HEADER, position, "malformed function header", tag="header"))
            return
        self._declare(header.name, _KEYWORD_DSL_TYPES[header.return_keyword], node.position, declarations=True)
        self.cursor.enter_function(header.name)
        for keyword, name, is_array in header.params:
            base = _KEYWORD_DSL_TYPES[keyword]
            self._declare(name, ArrayOf(base) if is_array else base, node.position)
        for child in node.children:
            if child.name != "header":
                self.visit(child, in_declare=False)
        self.cursor.leave_function()


def analyze(events: Iterable[XmlEvent], schema: Schema | None = None, strict: bool = False) -> tuple[SymbolTable, list[Diagnostic]]:
    """Build the symbol table and report declaration/use faults."""
    analysis = _Analysis(schema or builtin_schema(), strict)
    analysis.run(events)
    return analysis.table, analysis.diags
