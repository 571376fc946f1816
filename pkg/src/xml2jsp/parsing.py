"""Micro-parsers for the text payloads carried inside dialect tags."""

import re
from dataclasses import dataclass

# Dialect type keyword -> Java type.
KEYWORD_TYPES = {"integer": "int", "real": "double", "string": "String"}

# Setter/getter keywords -> JDBC accessor suffix.
ACCESSOR_FROM_KEYWORD = {
    "int": "Int",
    "integer": "Int",
    "double": "Double",
    "real": "Double",
    "string": "String",
}

IDENTIFIER_RE = re.compile(r"_*[A-Za-z][\w_]*")

_ARRAY_RE = re.compile(r"\s*(integer|real|string)\s+(_*[A-Za-z][\w_]*)\s*\[\s*([0-9]+)\s*\]\s*")
_SETTER_RE = re.compile(r"\s*([A-Za-z]+)\s*\(\s*([0-9]+)\s*,([\s\S]+)\)\s*")
_GETTER_RE = re.compile(r"\s*(_*[A-Za-z][\w_]*)\s*=\s*([A-Za-z]+)\s*\(\s*([0-9]+)\s*\)\s*")
_QUERY_RE = re.compile(r"\s*(_*[A-Za-z][\w_]*)\s*=\s*\"([\s\S]*)\"\s*")
_CLASS_RE = re.compile(r"\s*([A-Za-z_][\w_.]*)\s+(_*[A-Za-z][\w_]*)\s*")
_HEADER_RE = re.compile(r"\s*([A-Za-z_][\w_]*)\s+(_*[A-Za-z][\w_]*)\s*\(([\s\S]*)\)\s*")
_PARAM_RE = re.compile(r"\s*(integer|real|string)\s+(_*[A-Za-z][\w_]*)\s*(\[\s*\])?\s*")
_STRING_LITERAL_RE = re.compile(r'"[^"]*"|\'[^\']*\'')

# Java literals that may appear bare inside conditions.
_CONDITION_LITERALS = frozenset({"true", "false", "null"})


def split_binding(text: str) -> tuple[str, str] | None:
    """Split 'name = value' on the first '='; None when the shape is off."""
    if "=" not in text:
        return None
    name, value = text.split("=", 1)
    name = name.strip()
    value = value.strip()
    if IDENTIFIER_RE.fullmatch(name) is None or not value:
        return None
    return name, value


def parse_array_decl(text: str) -> tuple[str, str, str] | None:
    m = _ARRAY_RE.fullmatch(text)
    if m is None:
        return None
    return m.group(1), m.group(2), m.group(3)


def parse_setter(text: str) -> tuple[str, str, str] | None:
    """'int(1,b)' -> (keyword, index, raw argument)."""
    m = _SETTER_RE.fullmatch(text)
    if m is None:
        return None
    return m.group(1).lower(), m.group(2), m.group(3).strip()


def parse_getter(text: str) -> tuple[str, str, str] | None:
    """'v=int(2)' -> (target, keyword, index)."""
    m = _GETTER_RE.fullmatch(text)
    if m is None:
        return None
    return m.group(1), m.group(2).lower(), m.group(3)


def parse_query(text: str) -> tuple[str, str] | None:
    """'name="sql"' -> (statement name, sql text)."""
    m = _QUERY_RE.fullmatch(text)
    if m is None:
        return None
    return m.group(1), m.group(2)


def parse_class_decl(text: str) -> tuple[str, str] | None:
    m = _CLASS_RE.fullmatch(text)
    if m is None:
        return None
    return m.group(1), m.group(2)


@dataclass(frozen=True)
class FunctionHeader:
    return_keyword: str
    name: str
    params: tuple[tuple[str, str, bool], ...]  # (type keyword, name, is_array)


def parse_function_header(text: str) -> FunctionHeader | None:
    m = _HEADER_RE.fullmatch(text)
    if m is None:
        return None
    return_kw, name, params_text = m.group(1), m.group(2), m.group(3)
    if return_kw not in KEYWORD_TYPES:
        return None
    params: list[tuple[str, str, bool]] = []
    if params_text.strip():
        for piece in params_text.split(","):
            pm = _PARAM_RE.fullmatch(piece)
            if pm is None:
                return None
            params.append((pm.group(1), pm.group(2), pm.group(3) is not None))
    return FunctionHeader(return_kw, name, tuple(params))


def identifiers_in(text: str) -> list[str]:
    """Bare identifiers in an expression, ignoring literals and keywords."""
    stripped = _STRING_LITERAL_RE.sub(" ", text)
    found = []
    for m in re.finditer(r"[A-Za-z_][\w_]*", stripped):
        word = m.group()
        if word not in _CONDITION_LITERALS:
            found.append(word)
    return found


def collapse_whitespace(text: str) -> str:
    """Trim and fold internal whitespace runs to single spaces."""
    return " ".join(text.split())


def escape_java_string(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')
