"""Recursive-descent parser for MiniJS.

Binding strength, loosest first: assignment, ternary, ``??``, ``||``, ``&&``,
equality, comparison, additive, multiplicative, unary, member/call.
``??`` may not be mixed with ``||`` or ``&&`` unless one side is
parenthesized.
"""

from __future__ import annotations

from . import ast as A
from .ast import UNDEFINED, SourceLocation
from .lexer import FrontendError, Token, tokenize


class ParseError(FrontendError):
    pass


EQUALITY = {"EqEq": "==", "EqEqEq": "===", "NotEq": "!=", "NotEqEq": "!=="}
COMPARISON = {"Lt": "<", "LtEq": "<=", "Gt": ">", "GtEq": ">="}
ADDITIVE = {"Plus": "+", "Minus": "-"}
MULTIPLICATIVE = {"Star": "*", "Slash": "/", "Percent": "%"}

TOKEN_TEXT = {
    "Semi": "';'",
    "RParen": "')'",
    "LParen": "'('",
    "RBrace": "'}'",
    "LBrace": "'{'",
    "RBracket": "']'",
    "Colon": "':'",
    "Ident": "identifier",
    "Eof": "end of input",
}


def _describe(tok: Token) -> str:
    if tok.kind == "Eof":
        return "end of input"
    if tok.kind == "Str":
        return f"string {tok.value!r}"
    if tok.kind == "Num":
        return f"number {tok.value:g}"
    return f"'{tok.value}'"


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.next_id = 0
        self.parenthesized: set[int] = set()

    # -- token helpers --------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, *kinds: str) -> bool:
        return self.tok.kind in kinds

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "Eof":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            raise ParseError(
                f"expected {TOKEN_TEXT.get(kind, kind)}, found {_describe(self.tok)}", self.tok.loc
            )
        return self.advance()

    def prev_end(self) -> SourceLocation:
        return self.tokens[self.pos - 1].loc

    def make(self, cls, start: SourceLocation, *args, **kwargs):
        node = cls(start.span(self.prev_end()), *args, **kwargs)
        node.id = self.next_id
        self.next_id += 1
        return node

    # -- statements -----------------------------------------------------

    def parse_program(self, file: str) -> A.Program:
        body = []
        while not self.at("Eof"):
            body.append(self.statement())
        end = self.tok.loc
        prog = A.Program(SourceLocation(file, 1, 1, 0, max(end.byte_end, 1)), body, file)
        prog.id = self.next_id
        self.next_id += 1
        return prog

    def end_statement(self) -> None:
        if self.at("Semi"):
            self.advance()
            return
        # newline-terminated statements, or before '}' / end of input
        if self.at("RBrace", "Eof") or self.tok.loc.line > self.prev_end().line:
            return
        raise ParseError(f"expected ';', found {_describe(self.tok)}", self.tok.loc)

    def block_or_statement(self) -> list:
        if self.at("LBrace"):
            self.advance()
            body = []
            while not self.at("RBrace"):
                if self.at("Eof"):
                    raise ParseError("expected '}', found end of input", self.tok.loc)
                body.append(self.statement())
            self.advance()
            return body
        return [self.statement()]

    def statement(self) -> A.Node:
        start = self.tok.loc
        kind = self.tok.kind
        if kind == "Let":
            node = self.var_decl()
            self.end_statement()
            return node
        if kind == "Function" and self.peek().kind == "Ident":
            self.advance()
            name = self.expect("Ident").value
            params, body = self.function_rest()
            return self.make(A.FunctionDecl, start, name, params, body)
        if kind == "If":
            self.advance()
            self.expect("LParen")
            test = self.expression()
            self.expect("RParen")
            then = self.block_or_statement()
            other = None
            if self.at("Else"):
                self.advance()
                other = self.block_or_statement()
            return self.make(A.If, start, test, then, other)
        if kind == "While":
            self.advance()
            self.expect("LParen")
            test = self.expression()
            self.expect("RParen")
            body = self.block_or_statement()
            return self.make(A.While, start, test, body)
        if kind == "For":
            return self.for_statement()
        if kind == "Return":
            self.advance()
            value = None
            if not self.at("Semi", "RBrace", "Eof") and self.tok.loc.line == self.prev_end().line:
                value = self.expression()
            self.end_statement()
            return self.make(A.Return, start, value)
        if (
            kind == "Ident"
            and self.tok.value == "module"
            and self.peek().kind == "Dot"
            and self.peek(2).kind == "Ident"
            and self.peek(2).value == "exports"
            and self.peek(3).kind == "Eq"
        ):
            self.pos += 4
            value = self.expression()
            node = self.make(A.ExportStmt, start, value)
            self.end_statement()
            return node
        expr = self.expression()
        self.end_statement()
        return expr

    def var_decl(self) -> A.VarDecl:
        start = self.expect("Let").loc
        name = self.expect("Ident").value
        init = None
        if self.at("Eq"):
            self.advance()
            init = self.expression()
        return self.make(A.VarDecl, start, name, init)

    def for_statement(self) -> A.For:
        start = self.expect("For").loc
        self.expect("LParen")
        if (
            self.at("Let")
            and self.peek().kind == "Ident"
            and self.peek(2).kind == "Ident"
            and self.peek(2).value == "of"
        ):
            self.advance()
            each = self.advance().value
            self.advance()
            iterable = self.expression()
            self.expect("RParen")
            body = self.block_or_statement()
            return self.make(A.For, start, None, None, None, body, each, iterable)
        init = None
        if not self.at("Semi"):
            init = self.var_decl() if self.at("Let") else self.expression()
        self.expect("Semi")
        test = None if self.at("Semi") else self.expression()
        self.expect("Semi")
        update = None if self.at("RParen") else self.expression()
        self.expect("RParen")
        body = self.block_or_statement()
        return self.make(A.For, start, init, test, update, body)

    def function_rest(self) -> tuple[list, list]:
        self.expect("LParen")
        params = []
        while not self.at("RParen"):
            params.append(self.expect("Ident").value)
            if not self.at("RParen"):
                self.expect("Comma")
        self.advance()
        self.expect("LBrace")
        body = []
        while not self.at("RBrace"):
            if self.at("Eof"):
                raise ParseError("expected '}', found end of input", self.tok.loc)
            body.append(self.statement())
        self.advance()
        return params, body

    # -- expressions ----------------------------------------------------

    def expression(self) -> A.Node:
        return self.assignment()

    def assignment(self) -> A.Node:
        start = self.tok.loc
        target = self.ternary()
        if not self.at("Eq"):
            return target
        eq = self.advance()
        value = self.assignment()
        if isinstance(target, A.Identifier) and target.id not in self.parenthesized:
            return self.make(A.Assign, start, target.name, value)
        if isinstance(target, A.MemberRead) and target.id not in self.parenthesized:
            return self.make(A.MemberWrite, start, target.obj, target.key, target.computed, value)
        raise ParseError("invalid assignment target", eq.loc)

    def ternary(self) -> A.Node:
        start = self.tok.loc
        test = self.nullish()
        if not self.at("Question"):
            return test
        self.advance()
        then = self.assignment()
        self.expect("Colon")
        other = self.assignment()
        return self.make(A.Ternary, start, test, then, other)

    def _bare_logical(self, node: A.Node, kinds: tuple[str, ...]) -> bool:
        return node.kind in kinds and node.id not in self.parenthesized

    def nullish(self) -> A.Node:
        start = self.tok.loc
        left = self.logical_or()
        if not self.at("QQ"):
            return left
        if self._bare_logical(left, ("LogicalOr", "LogicalAnd")):
            raise ParseError("cannot mix '??' with '||' or '&&' without parentheses", self.tok.loc)
        while self.at("QQ"):
            op = self.advance()
            right = self.logical_or()
            if self._bare_logical(right, ("LogicalOr", "LogicalAnd")):
                raise ParseError("cannot mix '??' with '||' or '&&' without parentheses", op.loc)
            left = self.make(A.NullishCoalesce, start, left, right)
        return left

    def logical_or(self) -> A.Node:
        start = self.tok.loc
        left = self.logical_and()
        while self.at("OrOr"):
            self.advance()
            right = self.logical_and()
            left = self.make(A.LogicalOr, start, left, right)
        return left

    def logical_and(self) -> A.Node:
        start = self.tok.loc
        left = self.equality()
        while self.at("AndAnd"):
            self.advance()
            right = self.equality()
            left = self.make(A.LogicalAnd, start, left, right)
        return left

    def _binary_level(self, ops: dict, next_level) -> A.Node:
        start = self.tok.loc
        left = next_level()
        while self.tok.kind in ops:
            op = ops[self.advance().kind]
            right = next_level()
            left = self.make(A.Binary, start, op, left, right)
        return left

    def equality(self) -> A.Node:
        return self._binary_level(EQUALITY, self.comparison)

    def comparison(self) -> A.Node:
        return self._binary_level(COMPARISON, self.additive)

    def additive(self) -> A.Node:
        return self._binary_level(ADDITIVE, self.multiplicative)

    def multiplicative(self) -> A.Node:
        return self._binary_level(MULTIPLICATIVE, self.unary)

    def unary(self) -> A.Node:
        start = self.tok.loc
        if self.at("Bang", "Minus", "Typeof"):
            op = self.advance().value
            operand = self.unary()
            return self.make(A.Unary, start, op, operand)
        return self.postfix()

    def postfix(self) -> A.Node:
        start = self.tok.loc
        node = self.primary()
        while True:
            if self.at("Dot"):
                self.advance()
                name_tok = self.advance()
                if name_tok.kind != "Ident" and name_tok.kind.lower() != name_tok.value:
                    raise ParseError(f"expected property name, found {_describe(name_tok)}", name_tok.loc)
                key, computed = name_tok.value, False
            elif self.at("LBracket"):
                self.advance()
                key, computed = self.expression(), True
                self.expect("RBracket")
            elif self.at("LParen"):
                args = self.arguments()
                node = self.make(A.Call, start, node, args)
                continue
            else:
                return node
            if self.at("LParen"):
                args = self.arguments()
                node = self.make(A.MethodCall, start, node, key, computed, args)
            else:
                node = self.make(A.MemberRead, start, node, key, computed)

    def arguments(self) -> list:
        self.expect("LParen")
        args = []
        while not self.at("RParen"):
            args.append(self.assignment())
            if not self.at("RParen"):
                self.expect("Comma")
        self.advance()
        return args

    def primary(self) -> A.Node:
        tok = self.tok
        start = tok.loc
        kind = tok.kind
        if kind == "Num" or kind == "Str":
            self.advance()
            return self.make(A.Literal, start, tok.value)
        if kind in ("True", "False"):
            self.advance()
            return self.make(A.Literal, start, kind == "True")
        if kind == "Null":
            self.advance()
            return self.make(A.Literal, start, None)
        if kind == "Undefined":
            self.advance()
            return self.make(A.Literal, start, UNDEFINED)
        if kind == "Ident" or kind == "This":
            self.advance()
            return self.make(A.Identifier, start, tok.value)
        if kind == "LParen":
            self.advance()
            inner = self.expression()
            self.expect("RParen")
            self.parenthesized.add(inner.id)
            return inner
        if kind == "LBracket":
            self.advance()
            elements = []
            while not self.at("RBracket"):
                elements.append(self.assignment())
                if not self.at("RBracket"):
                    self.expect("Comma")
            self.advance()
            return self.make(A.ArrayLiteral, start, elements)
        if kind == "LBrace":
            return self.object_literal()
        if kind == "Function":
            self.advance()
            name = self.advance().value if self.at("Ident") else None
            params, body = self.function_rest()
            return self.make(A.FunctionExpr, start, name, params, body)
        if kind == "Require":
            self.advance()
            self.expect("LParen")
            arg = self.assignment()
            self.expect("RParen")
            return self.make(A.RequireExpr, start, arg)
        raise ParseError(f"unexpected {_describe(tok)}", tok.loc)

    def object_literal(self) -> A.ObjectLiteral:
        start = self.expect("LBrace").loc
        props = []
        while not self.at("RBrace"):
            key_tok = self.advance()
            if key_tok.kind == "Str":
                key = key_tok.value
            elif key_tok.kind == "Num":
                key = _number_key(key_tok.value)
            elif key_tok.kind == "Ident" or key_tok.kind.lower() == key_tok.value:
                key = key_tok.value
            else:
                raise ParseError(f"expected property name, found {_describe(key_tok)}", key_tok.loc)
            if self.at("Colon"):
                self.advance()
                value = self.assignment()
            elif key_tok.kind == "Ident":
                value = A.Identifier(key_tok.loc, key)
                value.id = self.next_id
                self.next_id += 1
            else:
                raise ParseError(f"expected ':', found {_describe(self.tok)}", self.tok.loc)
            props.append((key, value))
            if not self.at("RBrace"):
                self.expect("Comma")
        self.advance()
        return self.make(A.ObjectLiteral, start, props)


def _number_key(value: float) -> str:
    return str(int(value)) if value == int(value) else repr(value)


def parse(tokens: list[Token], file: str | None = None) -> A.Program:
    """Parse a token list produced by :func:`tokenize` into a Program node."""
    if file is None:
        file = tokens[0].loc.file if tokens else "<input>"
    return Parser(tokens).parse_program(file)


def parse_source(source: str, file: str = "<input>") -> A.Program:
    return parse(tokenize(source, file), file)


def parse_expression(source: str, file: str = "<input>") -> A.Node:
    """Parse a single expression (no trailing statement terminator required)."""
    p = Parser(tokenize(source, file))
    node = p.expression()
    if not p.at("Eof"):
        raise ParseError(f"unexpected {_describe(p.tok)}", p.tok.loc)
    return node
