"""Tokenizer for MiniJS source text."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .ast import SourceLocation


class FrontendError(Exception):
    def __init__(self, message: str, loc: SourceLocation):
        super().__init__(f"{loc.file}:{loc.line}:{loc.column}: {message}")
        self.message = message
        self.loc = loc


class LexError(FrontendError):
    pass


KEYWORDS = {
    "let": "Let",
    "function": "Function",
    "return": "Return",
    "if": "If",
    "else": "Else",
    "while": "While",
    "for": "For",
    "true": "True",
    "false": "False",
    "null": "Null",
    "undefined": "Undefined",
    "typeof": "Typeof",
    "this": "This",
    "require": "Require",
}

# Longest match first within each leading character.
PUNCTUATORS = [
    ("===", "EqEqEq"),
    ("!==", "NotEqEq"),
    ("==", "EqEq"),
    ("!=", "NotEq"),
    ("<=", "LtEq"),
    (">=", "GtEq"),
    ("&&", "AndAnd"),
    ("||", "OrOr"),
    ("??", "QQ"),
    ("=", "Eq"),
    ("!", "Bang"),
    ("<", "Lt"),
    (">", "Gt"),
    ("+", "Plus"),
    ("-", "Minus"),
    ("*", "Star"),
    ("/", "Slash"),
    ("%", "Percent"),
    ("?", "Question"),
    (":", "Colon"),
    (",", "Comma"),
    (";", "Semi"),
    (".", "Dot"),
    ("(", "LParen"),
    (")", "RParen"),
    ("{", "LBrace"),
    ("}", "RBrace"),
    ("[", "LBracket"),
    ("]", "RBracket"),
]

ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"'}


@dataclass(frozen=True)
class Token:
    kind: str
    value: Any
    loc: SourceLocation

    def __repr__(self) -> str:
        if self.kind in ("Ident", "Num", "Str"):
            return f"{self.kind}({self.value!r})"
        return self.kind


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    """Split ``source`` into tokens, each with a byte-exact location.

    The returned list always ends with an ``Eof`` token.
    """
    # byte offset of every character index (plus one past the end)
    offsets = [0] * (len(source) + 1)
    total = 0
    for i, ch in enumerate(source):
        offsets[i] = total
        total += len(ch.encode("utf-8"))
    offsets[len(source)] = total

    tokens: list[Token] = []
    i = 0
    line = 1
    line_start = 0
    n = len(source)

    def loc(start: int, end: int, start_line: int, start_col: int) -> SourceLocation:
        return SourceLocation(file, start_line, start_col, offsets[start], offsets[end])

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            line_start = i
            continue
        if ch in " \t\r":
            i += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if source.startswith("/*", i):
            end = source.find("*/", i + 2)
            if end < 0:
                raise LexError("unterminated comment", loc(i, i + 2, line, i - line_start + 1))
            for j in range(i, end):
                if source[j] == "\n":
                    line += 1
                    line_start = j + 1
            i = end + 2
            continue

        col = i - line_start + 1
        start = i
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            while i < n and source[i].isdigit():
                i += 1
            if i < n and source[i] == "." and i + 1 < n and source[i + 1].isdigit():
                i += 1
                while i < n and source[i].isdigit():
                    i += 1
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isdigit():
                    i = j
                    while i < n and source[i].isdigit():
                        i += 1
            tokens.append(Token("Num", float(source[start:i]), loc(start, i, line, col)))
            continue
        if ch.isalpha() or ch in "_$":
            while i < n and (source[i].isalnum() or source[i] in "_$"):
                i += 1
            word = source[start:i]
            kind = KEYWORDS.get(word, "Ident")
            tokens.append(Token(kind, word, loc(start, i, line, col)))
            continue
        if ch in "'\"":
            quote = ch
            i += 1
            chars = []
            while True:
                if i >= n or source[i] == "\n":
                    raise LexError("unterminated string literal", loc(start, start + 1, line, col))
                c = source[i]
                if c == quote:
                    i += 1
                    break
                if c == "\\":
                    if i + 1 >= n:
                        raise LexError("unterminated string literal", loc(start, start + 1, line, col))
                    esc = source[i + 1]
                    if esc not in ESCAPES:
                        raise LexError(
                            f"unsupported escape sequence \\{esc}",
                            loc(i, i + 2, line, i - line_start + 1),
                        )
                    chars.append(ESCAPES[esc])
                    i += 2
                    continue
                chars.append(c)
                i += 1
            tokens.append(Token("Str", "".join(chars), loc(start, i, line, col)))
            continue
        for text, kind in PUNCTUATORS:
            if source.startswith(text, i):
                i += len(text)
                tokens.append(Token(kind, text, loc(start, i, line, col)))
                break
        else:
            raise LexError(f"illegal character {ch!r}", loc(i, i + 1, line, col))

    eof = SourceLocation(file, line, n - line_start + 1, offsets[n], offsets[n])
    tokens.append(Token("Eof", None, eof))
    return tokens
