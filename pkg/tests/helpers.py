"""Shared test utilities: token comparison and balance checks."""

import re
from pathlib import Path

DATA = Path(__file__).parent / "data"

_TOKEN_RE = re.compile(
    r'"(?:[^"\\]|\\.)*"'  # string literal
    r"|<%[!@=]?|%>"  # JSP block markers
    r"|[A-Za-z_][A-Za-z0-9_]*"  # word
    r"|[0-9]+(?:\.[0-9]+)?"  # number
    r"|\S"  # any other single symbol
)


def jsp_tokens(text: str) -> list[str]:
    """Token stream with whitespace (including inside string literals) folded."""
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        tok = m.group()
        if tok.startswith('"') and tok.endswith('"') and len(tok) >= 2:
            tok = '"%s"' % " ".join(tok[1:-1].split())
        tokens.append(tok)
    return tokens


def assert_tokens_equal(generated: str, expected: str) -> None:
    got, want = jsp_tokens(generated), jsp_tokens(expected)
    assert got == want, _token_diff(got, want)


def _token_diff(got: list[str], want: list[str]) -> str:
    for i, (g, w) in enumerate(zip(got, want)):
        if g != w:
            context = " ".join(want[max(0, i - 5) : i + 5])
            return f"token {i}: got {g!r}, want {w!r} (near: ...{context}...)"
    return f"length mismatch: got {len(got)} tokens, want {len(want)}"


def braces_balanced(text: str) -> bool:
    return text.count("{") == text.count("}")


def scriptlet_blocks_balanced(text: str) -> bool:
    """Every <% opener is closed by %> before the next opens."""
    opens = re.findall(r"<%[!@=]?|%>", text)
    depth = 0
    for marker in opens:
        if marker == "%>":
            depth -= 1
            if depth < 0:
                return False
        else:
            depth += 1
            if depth > 1:
                return False
    return depth == 0


def load(name: str) -> str:
    return (DATA / name).read_text(encoding="utf-8")


def match_identifier_reference(text: str) -> bool:
    """Hand-rolled acceptor for the identifier facet, used as an oracle.

    Accepts: optional whitespace, underscores, one ASCII letter, word
    characters, optional trailing whitespace.
    """
    i, n = 0, len(text)
    while i < n and text[i].isspace():
        i += 1
    while i < n and text[i] == "_":
        i += 1
    if i >= n or not ("a" <= text[i] <= "z" or "A" <= text[i] <= "Z"):
        return False
    i += 1
    while i < n and (text[i].isalnum() or text[i] == "_"):
        i += 1
    while i < n and text[i].isspace():
        i += 1
    return i == n
