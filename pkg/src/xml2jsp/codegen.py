"""Tag handlers and the JSP emitter.

One handler per tag category turns validated elements into ordered output
fragments: variable and function declarations collect into a single
declarations block, everything else becomes scriptlet code or JSP action
tags.  Fragments produced while translating one element all carry that
element's source position.
"""

from dataclasses import dataclass, field
from io import StringIO
from typing import Iterable, Iterator

from . import parsing, statements
from .diagnostics import Diagnostic, error, note
from .nodes import Node, iter_top_level
from .options import TranslationOptions
from .reader import SourcePosition, XmlEvent
from .schema import MISSING_CHILD
from .symbols import (
    ArrayOf,
    ConnectionType,
    IntType,
    RealType,
    ResultCountType,
    ScopeCursor,
    StringType,
    SymbolTable,
    UNDECLARED_VAR,
    UNRECOGNIZED_LITERAL,
    UnrecognizedLiteralError,
    infer_literal_type,
)

ZERO_ARRAY_SIZE = "ZeroArraySize"
INVALID_READ_COMBO = "InvalidReadCombo"
NESTED_DB = "NestedDb"
NO_DB_CONTEXT = "NoDbContext"
RESULT_AND_GET_MIX = "ResultAndGetMix"
BAD_SET_SYNTAX = "BadSetSyntax"
MALFORMED_CLASS_DECL = "MalformedClassDecl"
SETTER_KEYWORD_MISMATCH = "SetterKeywordMismatch"
SCRIPTLET_DELIMITER = "ScriptletDelimiter"

DECLARATIONS = "declarations"
BODY = "body"

_JAVA_TYPES = {IntType(): "int", RealType(): "double", StringType(): "String"}


@dataclass(frozen=True)
class Fragment:
    text: str
    origin: SourcePosition
    indent: int = 0
    action: bool = False


@dataclass
class JspProgram:
    declarations: list[Fragment] = field(default_factory=list)
    body: list[Fragment] = field(default_factory=list)


@dataclass
class DbContext:
    conn_name: str
    opened_at: SourcePosition
    excep_msg: str | None = None
    open: bool = True


def _xml_attr(value: str) -> str:
    return value.replace("&", "&amp;").replace("<", "&lt;").replace('"', "&quot;")


class Translator:
    """Single-use walker turning one event stream into fragments."""

    def __init__(self, table: SymbolTable, options: TranslationOptions | None = None):
        self.table = table
        self.options = options or TranslationOptions()
        self.cursor = ScopeCursor(table)
        self.diagnostics: list[Diagnostic] = []
        self.tracker = statements.BlockTracker()
        self.db: DbContext | None = None
        self.indent = 0
        self._last_position = SourcePosition(1, 1, 0)

    # -- small helpers -------------------------------------------------------

    def _println(self) -> str:
        return "out.println" if self.options.response_out else "System.out.println"

    def _error(self, code: str, position: SourcePosition, message: str, tag: str | None = None) -> None:
        self.diagnostics.append(error(code, position, message, tag))

    def _scriptlet(self, text: str, origin: SourcePosition) -> tuple[str, Fragment]:
        if "%>" in text:
            self._error(SCRIPTLET_DELIMITER, origin, "generated code would contain '%>'")
            text = text.replace("%>", "")
        return BODY, Fragment(text, origin, self.indent)

    def _action(self, text: str, origin: SourcePosition) -> tuple[str, Fragment]:
        return BODY, Fragment(text, origin, self.indent, action=True)

    def _string(self, text: str) -> str:
        return '"%s"' % parsing.escape_java_string(parsing.collapse_whitespace(text))

    # -- top-level walk -------------------------------------------------------

    def fragments(self, events: Iterable[XmlEvent]) -> Iterator[tuple[str, Fragment]]:
        for node in iter_top_level(events):
            self._last_position = node.position
            if node.name == "declare":
                for child in node.children:
                    yield from self._declaration_child(child)
            elif node.name == "function":
                yield from self.handle_function(node)
            else:
                yield from self._body_node(node)
        if self.db is not None and self.db.open:
            yield from self._close_db(self._last_position)
        self.diagnostics.extend(statements.finish_blocks(self.tracker))

    def translate(self, events: Iterable[XmlEvent]) -> JspProgram:
        program = JspProgram()
        for section, fragment in self.fragments(events):
            (program.declarations if section == DECLARATIONS else program.body).append(fragment)
        return program

    def _declaration_child(self, node: Node) -> Iterator[tuple[str, Fragment]]:
        if node.name == "var":
            yield from self.handle_var(node, in_declare=True)
        elif node.name == "array":
            yield from self.handle_array(node, in_declare=True)

    def _body_node(self, node: Node) -> Iterator[tuple[str, Fragment]]:
        name = node.name
        if name == "var":
            yield from self.handle_var(node, in_declare=False)
        elif name == "array":
            yield from self.handle_array(node, in_declare=False)
        elif name == "s":
            yield from self._handle_statement(node)
        elif name == "out":
            yield from self.handle_out(node)
        elif name == "write":
            text = self._string(node.text)
            yield self._scriptlet(f"{self._println()}({text});", node.position)
        elif name == "writev":
            yield from self._bare_writev(node)
        elif name == "read":
            yield from self.handle_read(node)
        elif name == "dB":
            yield from self.handle_db(node)
        elif name == "ps":
            yield from self.handle_ps(node)
        elif name == "class":
            yield from self.handle_class(node)
        elif name in ("redirect", "include", "forward", "session"):
            yield from self.handle_actions(node)

    # -- variables and arrays --------------------------------------------------

    def handle_var(self, node: Node, in_declare: bool, origin: SourcePosition | None = None) -> Iterator[tuple[str, Fragment]]:
        origin = origin or node.position
        binding = parsing.split_binding(node.text)
        if binding is None:
            self._error(UNRECOGNIZED_LITERAL, node.position, f"malformed variable binding {node.text.strip()!r}", tag="var")
            return
        name, value = binding
        symbol = self.cursor.lookup(name)
        if symbol is not None and symbol.is_read_target:
            text = f'String {name}="";'
        else:
            try:
                dsl_type = infer_literal_type(value)
            except UnrecognizedLiteralError as exc:
                self._error(UNRECOGNIZED_LITERAL, node.position, str(exc), tag="var")
                return
            text = f"{_JAVA_TYPES[dsl_type]} {name} = {self._literal(value, dsl_type)};"
        if in_declare:
            yield DECLARATIONS, Fragment(text, origin)
        else:
            yield self._scriptlet(text, origin)

    def _literal(self, value: str, dsl_type) -> str:
        if isinstance(dsl_type, StringType):
            return self._string(value.strip()[1:-1])
        return value.strip()

    def handle_array(self, node: Node, in_declare: bool) -> Iterator[tuple[str, Fragment]]:
        parsed = parsing.parse_array_decl(node.text)
        if parsed is None:
            self._error(UNRECOGNIZED_LITERAL, node.position, f"malformed array declaration {node.text.strip()!r}", tag="array")
            return
        keyword, name, size_text = parsed
        size = int(size_text)
        if size == 0:
            self._error(ZERO_ARRAY_SIZE, node.position, f"array {name!r} must have a non-zero size", tag="array")
            return
        java = parsing.KEYWORD_TYPES[keyword]
        text = f"{java}[] {name} = new {java}[{size}];"
        if in_declare:
            yield DECLARATIONS, Fragment(text, node.position)
        else:
            yield self._scriptlet(text, node.position)

    # -- input and output --------------------------------------------------------

    def handle_read(self, node: Node, origin: SourcePosition | None = None) -> Iterator[tuple[str, Fragment]]:
        origin = origin or node.position
        target = node.text.strip()
        object_node, type_node, name_node = node.find("object"), node.find("type"), node.find("name")
        if not target or object_node is None or type_node is None or name_node is None:
            self._error(MISSING_CHILD, node.position, "read needs a target, <object>, <type> and <name>", tag="read")
            return
        source = object_node.text.strip().lower()
        kind = type_node.text.strip().lower()
        param = parsing.escape_java_string(name_node.text.strip())
        if source == "request" and kind == "parameter":
            assignment = f'{target}=request.getParameter("{param}");'
        elif source == "session" and kind == "attribute":
            assignment = f'{target}=(String)session.getAttribute("{param}");'
        elif source == "request" and kind == "attribute":
            assignment = f'{target}=(String)request.getAttribute("{param}");'
        else:
            self._error(INVALID_READ_COMBO, node.position, f"cannot read a {kind} from the {source} object", tag="read")
            return
        symbol = self.cursor.lookup(target)
        if symbol is None or (symbol.implicit and symbol.is_read_target and symbol.declared_at == node.position):
            yield self._scriptlet(f'String {target}="";', origin)
        yield self._scriptlet(assignment, origin)

    def handle_out(self, node: Node) -> Iterator[tuple[str, Fragment]]:
        pieces = []
        for child in node.children:
            if child.name == "write":
                pieces.append(self._string(child.text))
            elif child.name == "writev":
                name = child.text.strip()
                if self.cursor.lookup(name) is None:
                    self._error(UNDECLARED_VAR, child.position, f"variable {name!r} is not declared", tag="writev")
                    return
                pieces.append(name)
        if not pieces:
            yield self._scriptlet(f'{self._println()}("");', node.position)
            return
        joined = " + ".join(pieces)
        yield self._scriptlet(f'{self._println()}({joined} +"");', node.position)

    def _bare_writev(self, node: Node) -> Iterator[tuple[str, Fragment]]:
        name = node.text.strip()
        if self.cursor.lookup(name) is None:
            self._error(UNDECLARED_VAR, node.position, f"variable {name!r} is not declared", tag="writev")
            return
        yield self._scriptlet(f'{self._println()}({name}+"");', node.position)

    # -- statements ----------------------------------------------------------------

    def _handle_statement(self, node: Node) -> Iterator[tuple[str, Fragment]]:
        try:
            statement = statements.parse_statement(node.text)
        except statements.MalformedStatementError as exc:
            self._error(statements.MALFORMED_STATEMENT, node.position, str(exc), tag="s")
            return
        diag = statements.track_block(self.tracker, statement, node.position)
        if diag is not None:
            self.diagnostics.append(diag)
            return
        if isinstance(statement, statements.If):
            condition = parsing.collapse_whitespace(statement.condition)
            yield self._scriptlet(f"if({condition}) {{", node.position)
            self.indent += 1
        elif isinstance(statement, statements.Else):
            self.indent -= 1
            yield self._scriptlet("}", node.position)
            yield self._scriptlet("else {", node.position)
            self.indent += 1
        elif isinstance(statement, (statements.EndIf, statements.EndLoop)):
            self.indent -= 1
            yield self._scriptlet("}", node.position)
        elif isinstance(statement, statements.Loop):
            try:
                text = statements.translate_loop_header(
                    statement.header, self.options.strict, self.table, origin=node.position, function=self.cursor.function
                )
            except statements.UndeclaredLoopIndexError as exc:
                self._error(UNDECLARED_VAR, node.position, str(exc), tag="s")
                self.tracker.stack.pop()
                return
            yield self._scriptlet(text, node.position)
            self.indent += 1

    # -- database ---------------------------------------------------------------------

    def handle_db(self, node: Node) -> Iterator[tuple[str, Fragment]]:
        if node.find("dB") is not None:
            self._error(NESTED_DB, node.position, "a database section cannot contain another one", tag="dB")
            return
        if self.db is not None and self.db.open:
            # A second dB forces the previous region closed.
            yield from self._close_db(node.position)
        fields = {}
        for key in ("driver", "url", "uid", "pwd", "conn_name"):
            child = node.find(key)
            if child is None:
                self._error(MISSING_CHILD, node.position, f"<dB> is missing required child <{key}>", tag="dB")
                return
            fields[key] = parsing.collapse_whitespace(child.text)
        excep = node.find("excep_msg")
        conn = fields["conn_name"]
        yield self._scriptlet("try{", node.position)
        statements.push_try(self.tracker, node.position)
        self.indent += 1
        yield self._scriptlet(f'Class.forName("{parsing.escape_java_string(fields["driver"])}");', node.position)
        yield self._scriptlet(
            'Connection %s = DriverManager.getConnection("%s","%s","%s");'
            % (
                conn,
                parsing.escape_java_string(fields["url"]),
                parsing.escape_java_string(fields["uid"]),
                parsing.escape_java_string(fields["pwd"]),
            ),
            node.position,
        )
        self.db = DbContext(conn, node.position, excep.text.strip() if excep is not None else None)

    def _close_db(self, position: SourcePosition) -> Iterator[tuple[str, Fragment]]:
        diag = statements.pop_try(self.tracker, position)
        if diag is not None:
            self.diagnostics.append(diag)
        self.indent = max(0, self.indent - 1)
        yield self._scriptlet("}", position)
        catch_body = "e.printStackTrace();"
        if self.options.emit_excep_msg and self.db.excep_msg:
            catch_body = f"{self._println()}({self._string(self.db.excep_msg)});" + catch_body
        yield self._scriptlet("catch(Exception e){%s}" % catch_body, position)
        self.db.open = False

    def handle_ps(self, node: Node) -> Iterator[tuple[str, Fragment]]:
        origin = node.position
        if self.db is None or not self.db.open:
            self._error(NO_DB_CONTEXT, origin, "<ps> requires an open <dB> connection", tag="ps")
            return
        query_node = node.find("query")
        parsed = parsing.parse_query(query_node.text) if query_node is not None else None
        if parsed is None:
            self._error(MISSING_CHILD, origin, '<ps> needs a <query> of the form name="sql"', tag="ps")
            return
        stmt, sql = parsed
        if node.find("result") is not None and node.find("get") is not None:
            self._error(RESULT_AND_GET_MIX, origin, "<result> and <get> cannot be combined in one <ps>", tag="ps")
            return
        yield self._scriptlet(
            f'PreparedStatement {stmt} = {self.db.conn_name}.prepareStatement({self._string(sql)});', origin
        )
        executed_query = False
        for child in node.children:
            if child.name == "var":
                yield from self.handle_var(child, in_declare=False, origin=origin)
            elif child.name == "read":
                yield from self.handle_read(child, origin=origin)
            elif child.name == "set":
                yield from self._handle_set(child, stmt, origin)
            elif child.name == "result":
                name = child.text.strip()
                yield self._scriptlet(f"int {name}=0;", origin)
                yield self._scriptlet(f"{name}={stmt}.executeUpdate();", origin)
            elif child.name == "get":
                if not executed_query:
                    yield self._scriptlet(f"ResultSet rs_{stmt} = {stmt}.executeQuery();", origin)
                    executed_query = True
                yield from self._handle_get(child, stmt, origin)

    def _handle_set(self, node: Node, stmt: str, origin: SourcePosition) -> Iterator[tuple[str, Fragment]]:
        parsed = parsing.parse_setter(node.text)
        if parsed is None:
            self._error(BAD_SET_SYNTAX, node.position, f"malformed setter {node.text.strip()!r}", tag="set")
            return
        keyword, index, arg = parsed
        inferred = self._infer_accessor(arg, node.position)
        if inferred is None:
            return
        accessor, rendered = inferred
        advised = parsing.ACCESSOR_FROM_KEYWORD.get(keyword)
        if advised is not None and advised != accessor:
            self.diagnostics.append(
                note(
                    SETTER_KEYWORD_MISMATCH,
                    node.position,
                    f"keyword {keyword!r} suggests set{advised} but the argument needs set{accessor}",
                    tag="set",
                )
            )
        yield self._scriptlet(f"{stmt}.set{accessor}({index},{rendered});", origin)

    def _infer_accessor(self, arg: str, position: SourcePosition) -> tuple[str, str] | None:
        """JDBC accessor suffix and rendered Java value for a setter argument."""
        if parsing.IDENTIFIER_RE.fullmatch(arg):
            symbol = self.cursor.lookup(arg)
            if symbol is None:
                self._error(UNDECLARED_VAR, position, f"setter argument {arg!r} is not declared", tag="set")
                return None
            mapping = {StringType(): "String", IntType(): "Int", RealType(): "Double", ResultCountType(): "Int"}
            accessor = mapping.get(symbol.dsl_type)
            if accessor is None:
                self._error(BAD_SET_SYNTAX, position, f"variable {arg!r} cannot be bound as a statement parameter", tag="set")
                return None
            return accessor, arg
        try:
            literal_type = infer_literal_type(arg)
        except UnrecognizedLiteralError:
            self._error(BAD_SET_SYNTAX, position, f"cannot infer a parameter type for {arg!r}", tag="set")
            return None
        if isinstance(literal_type, StringType):
            return "String", self._string(arg.strip()[1:-1])
        if isinstance(literal_type, IntType):
            return "Int", arg.strip()
        return "Double", arg.strip()

    def _handle_get(self, node: Node, stmt: str, origin: SourcePosition) -> Iterator[tuple[str, Fragment]]:
        parsed = parsing.parse_getter(node.text)
        if parsed is None:
            self._error(BAD_SET_SYNTAX, node.position, f"malformed getter {node.text.strip()!r}", tag="get")
            return
        target, keyword, index = parsed
        accessor = parsing.ACCESSOR_FROM_KEYWORD.get(keyword)
        if accessor is None:
            self._error(BAD_SET_SYNTAX, node.position, f"unknown getter keyword {keyword!r}", tag="get")
            return
        yield self._scriptlet(f"if(rs_{stmt}.next()){{ {target}=rs_{stmt}.get{accessor}({index}); }}", origin)

    # -- functions and classes -----------------------------------------------------------

    def handle_function(self, node: Node) -> Iterator[tuple[str, Fragment]]:
        header_node = node.find("header")
        header = parsing.parse_function_header(header_node.text) if header_node is not None else None
        if header is None:
            self._error("MalformedHeader", node.position, "malformed function header", tag="function")
            return
        params = ", ".join(
            "%s%s %s" % (parsing.KEYWORD_TYPES[kw], "[]" if is_array else "", name) for kw, name, is_array in header.params
        )
        self.cursor.enter_function(header.name)
        outer_indent, outer_tracker = self.indent, self.tracker
        self.indent, self.tracker = 1, statements.BlockTracker()
        body: list[Fragment] = []
        for child in node.children:
            if child.name != "header":
                body.extend(fragment for _, fragment in self._body_node(child))
        self.diagnostics.extend(statements.finish_blocks(self.tracker))
        self.indent, self.tracker = outer_indent, outer_tracker
        self.cursor.leave_function()
        lines = ["%s %s(%s){" % (parsing.KEYWORD_TYPES[header.return_keyword], header.name, params)]
        for fragment in body:
            pad = "  " * fragment.indent
            lines.extend(pad + line for line in fragment.text.split("\n"))
        lines.append("}")
        yield DECLARATIONS, Fragment("\n".join(lines), node.position)

    def handle_class(self, node: Node) -> Iterator[tuple[str, Fragment]]:
        parsed = parsing.parse_class_decl(node.text)
        if parsed is None:
            self._error(MALFORMED_CLASS_DECL, node.position, f"expected 'ClassName objectName', got {node.text.strip()!r}", tag="class")
            return
        class_name, obj = parsed
        yield self._scriptlet(f"{class_name} {obj} = new {class_name}();", node.position)
        for pname in node.find_all("pname"):
            binding = parsing.split_binding(pname.text)
            if binding is None:
                self._error(MALFORMED_CLASS_DECL, pname.position, f"malformed pname {pname.text.strip()!r}", tag="pname")
                continue
            prop, value = binding
            setter = prop[0].upper() + prop[1:]
            yield self._scriptlet(f"{obj}.set{setter}({self._value_expr(value)});", node.position)

    def _value_expr(self, value: str) -> str:
        """Bare for in-scope identifiers and numeric literals, else quoted."""
        if parsing.IDENTIFIER_RE.fullmatch(value) and self.cursor.lookup(value) is not None:
            return value
        try:
            literal_type = infer_literal_type(value)
        except UnrecognizedLiteralError:
            return self._string(value)
        if isinstance(literal_type, StringType):
            return self._string(value.strip()[1:-1])
        return value.strip()

    # -- action tags ----------------------------------------------------------------------

    def handle_actions(self, node: Node) -> Iterator[tuple[str, Fragment]]:
        if node.name == "redirect":
            url = parsing.escape_java_string(node.text.strip())
            yield self._scriptlet(f'response.sendRedirect("{url}");', node.position)
        elif node.name == "include":
            yield self._action('<jsp:include page="%s" />' % _xml_attr(node.text.strip()), node.position)
        elif node.name == "forward":
            page = _xml_attr(node.text.strip())
            pnames = node.find_all("pname")
            if not pnames:
                yield self._action(f'<jsp:forward page="{page}" />', node.position)
                return
            parts = [f'<jsp:forward page="{page}">']
            for pname in pnames:
                binding = parsing.split_binding(pname.text)
                if binding is None:
                    self._error(MALFORMED_CLASS_DECL, pname.position, f"malformed pname {pname.text.strip()!r}", tag="pname")
                    continue
                name, value = binding
                parts.append('<jsp:param name="%s" value="%s"/>' % (_xml_attr(name), _xml_attr(value)))
            parts.append("</jsp:forward>")
            yield self._action("".join(parts), node.position)
        elif node.name == "session":
            for child in node.find_all("set"):
                binding = parsing.split_binding(child.text)
                if binding is None:
                    self._error(BAD_SET_SYNTAX, child.position, f"malformed session attribute {child.text.strip()!r}", tag="set")
                    continue
                name, value = binding
                yield self._scriptlet(f'session.setAttribute("{name}",{self._value_expr(value)});', node.position)


def translate(events: Iterable[XmlEvent], table: SymbolTable, options: TranslationOptions | None = None) -> tuple[JspProgram, list[Diagnostic]]:
    translator = Translator(table, options)
    program = translator.translate(events)
    return program, translator.diagnostics


# -- emission ---------------------------------------------------------------

_INDENT = "  "


class JspWriter:
    """Serializes fragments, coalescing adjacent scriptlets into one block."""

    def __init__(self, sink, options: TranslationOptions | None = None):
        self.sink = sink
        self._in_scriptlet = False
        if options is not None and options.emit_imports:
            self.sink.write('<%@ page import="java.sql.*" %>\n')

    def declarations(self, fragments: list[Fragment]) -> None:
        if not fragments:
            return
        self.sink.write("<%!\n")
        for fragment in fragments:
            self._lines(fragment)
        self.sink.write("%>\n")

    def body(self, fragment: Fragment) -> None:
        if fragment.action:
            self._close()
            self._lines(fragment)
        else:
            if not self._in_scriptlet:
                self.sink.write("<%\n")
                self._in_scriptlet = True
            self._lines(fragment)

    def _lines(self, fragment: Fragment) -> None:
        pad = _INDENT * fragment.indent
        for line in fragment.text.split("\n"):
            self.sink.write(pad + line + "\n")

    def _close(self) -> None:
        if self._in_scriptlet:
            self.sink.write("%>\n")
            self._in_scriptlet = False

    def finish(self) -> None:
        self._close()


def emit_program(program: JspProgram, sink, options: TranslationOptions | None = None) -> None:
    writer = JspWriter(sink, options)
    writer.declarations(program.declarations)
    for fragment in program.body:
        writer.body(fragment)
    writer.finish()


def render_program(program: JspProgram, options: TranslationOptions | None = None) -> str:
    out = StringIO()
    emit_program(program, out, options)
    return out.getvalue()
