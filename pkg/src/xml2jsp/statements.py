"""Parser for the mini-language inside <s> tags.

The statement forms are: `if (<cond>)` with an optional trailing `then`,
`else`, `endif`, `loop from <i>=<start> to <bound> step <step>`, and
`endloop`.  A bound starting with '(' is a verbatim condition; anything
else is an inclusive upper limit.
"""

import re
from dataclasses import dataclass

from .diagnostics import Diagnostic, error
from .reader import SourcePosition

MALFORMED_STATEMENT = "MalformedStatement"
UNBALANCED_BLOCK = "UnbalancedBlock"

LIMIT = "limit"
CONDITION = "condition"

IF_BLOCK = "if"
LOOP_BLOCK = "loop"
TRY_BLOCK = "try"


@dataclass(frozen=True)
class If:
    condition: str


@dataclass(frozen=True)
class Else:
    pass


@dataclass(frozen=True)
class EndIf:
    pass


@dataclass(frozen=True)
class LoopHeader:
    index: str
    start: str
    bound_kind: str  # LIMIT or CONDITION
    bound: str
    step: str


@dataclass(frozen=True)
class Loop:
    header: LoopHeader


@dataclass(frozen=True)
class EndLoop:
    pass


Statement = If | Else | EndIf | Loop | EndLoop


class MalformedStatementError(ValueError):
    pass


class UndeclaredLoopIndexError(LookupError):
    def __init__(self, index: str):
        super().__init__(f"loop index {index!r} is not declared")
        self.index = index


_LOOP_RE = re.compile(
    r"loop\s+from\s+(_*[A-Za-z][\w_]*)\s*=\s*(.+?)\s+to\s+(.+)\s+step\s+(\S.*)", re.DOTALL
)


def parse_statement(text: str) -> Statement:
    t = text.strip()
    if t == "else":
        return Else()
    if t == "endif":
        return EndIf()
    if t == "endloop":
        return EndLoop()
    if re.match(r"if\b|if\(", t):
        rest = t[2:].lstrip()
        if not rest.startswith("("):
            raise MalformedStatementError("if condition must be enclosed in parentheses")
        depth = 0
        end = -1
        for i, ch in enumerate(rest):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    end = i
                    break
        if end < 0:
            raise MalformedStatementError("unterminated condition parenthesis")
        condition = rest[1:end].strip()
        if not condition:
            raise MalformedStatementError("empty if condition")
        trailer = rest[end + 1 :].strip()
        if trailer not in ("", "then"):
            raise MalformedStatementError(f"unexpected text after condition: {trailer!r}")
        return If(condition)
    if re.match(r"loop\b", t):
        m = _LOOP_RE.fullmatch(t)
        if m is None:
            raise MalformedStatementError("loop header must be 'loop from i=start to bound step x'")
        index, start, bound, step = (g.strip() for g in m.groups())
        kind = CONDITION if bound.startswith("(") else LIMIT
        return Loop(LoopHeader(index, start, kind, bound, step))
    raise MalformedStatementError(f"unrecognized statement {t!r}")


def render_statement(statement: Statement) -> str:
    """Canonical source form; parse_statement(render_statement(s)) == s."""
    if isinstance(statement, If):
        return f"if ({statement.condition}) then"
    if isinstance(statement, Else):
        return "else"
    if isinstance(statement, EndIf):
        return "endif"
    if isinstance(statement, EndLoop):
        return "endloop"
    h = statement.header
    return f"loop from {h.index}={h.start} to {h.bound} step {h.step}"


def translate_loop_header(header: LoopHeader, strict: bool, table, origin: SourcePosition | None = None, function: str | None = None) -> str:
    """Render the Java for-statement opening a loop block.

    The index gets an inline `int` declaration when it was implicitly
    declared at this loop (or is absent from the table entirely).
    """
    symbol = table.lookup(header.index, function=function) if table is not None else None
    if symbol is None and strict:
        raise UndeclaredLoopIndexError(header.index)
    decl = ""
    if symbol is None:
        decl = "int "
    elif getattr(symbol, "implicit", False) and (origin is None or symbol.declared_at == origin):
        decl = "int "
    i = header.index
    if header.bound_kind == LIMIT:
        middle = f"{i}<={header.bound}"
    else:
        middle = header.bound
    return f"for({decl}{i}={header.start};{middle};{i}={i}+{header.step}){{"


class BlockTracker:
    """Checkpoint stack ensuring loops, if blocks and try regions close."""

    def __init__(self):
        self.stack: list[list] = []  # [kind, position, else_seen]

    def depth(self) -> int:
        return len(self.stack)


def track_block(tracker: BlockTracker, statement: Statement, position: SourcePosition) -> Diagnostic | None:
    stack = tracker.stack
    if isinstance(statement, If):
        stack.append([IF_BLOCK, position, False])
        return None
    if isinstance(statement, Loop):
        stack.append([LOOP_BLOCK, position, False])
        return None
    if isinstance(statement, Else):
        if not stack or stack[-1][0] != IF_BLOCK:
            return error(UNBALANCED_BLOCK, position, "'else' without an open if block")
        if stack[-1][2]:
            return error(UNBALANCED_BLOCK, position, "second 'else' in one if block")
        stack[-1][2] = True
        return None
    if isinstance(statement, EndIf):
        if not stack or stack[-1][0] != IF_BLOCK:
            return error(UNBALANCED_BLOCK, position, "'endif' without an open if block")
        stack.pop()
        return None
    if isinstance(statement, EndLoop):
        if not stack or stack[-1][0] != LOOP_BLOCK:
            return error(UNBALANCED_BLOCK, position, "'endloop' without an open loop block")
        stack.pop()
        return None
    return None


def push_try(tracker: BlockTracker, position: SourcePosition) -> None:
    tracker.stack.append([TRY_BLOCK, position, False])


def pop_try(tracker: BlockTracker, position: SourcePosition) -> Diagnostic | None:
    stack = tracker.stack
    if stack and stack[-1][0] == TRY_BLOCK:
        stack.pop()
        return None
    for i in range(len(stack) - 1, -1, -1):
        if stack[i][0] == TRY_BLOCK:
            kind, opened_at, _ = stack[-1]
            del stack[i]
            return error(UNBALANCED_BLOCK, opened_at, f"{kind} block not closed before the database section ends")
    return None


def finish_blocks(tracker: BlockTracker) -> list[Diagnostic]:
    out = []
    for kind, position, _ in tracker.stack:
        out.append(error(UNBALANCED_BLOCK, position, f"{kind} block is never closed"))
    tracker.stack.clear()
    return out
