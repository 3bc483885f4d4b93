"""MiniJS lexer, parser and printer."""

from .ast import UNDEFINED, Node, Program, SourceLocation, strip_locations
from .lexer import FrontendError, LexError, Token, tokenize
from .parser import ParseError, parse, parse_expression, parse_source
from .printer import pretty_print

__all__ = [
    "UNDEFINED",
    "FrontendError",
    "LexError",
    "Node",
    "ParseError",
    "Program",
    "SourceLocation",
    "Token",
    "parse",
    "parse_expression",
    "parse_source",
    "pretty_print",
    "strip_locations",
    "tokenize",
]
