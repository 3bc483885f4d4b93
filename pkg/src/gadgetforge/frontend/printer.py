"""Render an AST back to MiniJS source.

Compound expressions are always parenthesized, so the output reparses to the
same tree regardless of precedence (locations aside).
"""

from __future__ import annotations

import re

from . import ast as A
from .ast import UNDEFINED

_IDENT = re.compile(r"^[A-Za-z_$][A-Za-z0-9_$]*$")
_ESCAPE = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}


def quote(text: str) -> str:
    return '"' + "".join(_ESCAPE.get(c, c) for c in text) + '"'


def format_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e21:
        return str(int(value))
    return repr(value)


def pretty_print(node: A.Node, indent: str = "  ") -> str:
    return _Printer(indent).program(node)


class _Printer:
    def __init__(self, indent: str):
        self.unit = indent

    def program(self, node: A.Node) -> str:
        if isinstance(node, A.Program):
            return "".join(self.stmt(s, 0) for s in node.body)
        return self.stmt(node, 0)

    def block(self, body: list, depth: int) -> str:
        inner = "".join(self.stmt(s, depth + 1) for s in body)
        return "{\n" + inner + self.unit * depth + "}"

    def stmt(self, node: A.Node, depth: int) -> str:
        pad = self.unit * depth
        k = node.kind
        if k == "VarDecl":
            if node.init is None:
                return f"{pad}let {node.name};\n"
            return f"{pad}let {node.name} = {self.expr(node.init)};\n"
        if k == "FunctionDecl":
            return f"{pad}function {node.name}({', '.join(node.params)}) {self.block(node.body, depth)}\n"
        if k == "If":
            out = f"{pad}if ({self.expr(node.test)}) {self.block(node.then, depth)}"
            if node.other is not None:
                out += f" else {self.block(node.other, depth)}"
            return out + "\n"
        if k == "While":
            return f"{pad}while ({self.expr(node.test)}) {self.block(node.body, depth)}\n"
        if k == "For":
            if node.each is not None:
                head = f"let {node.each} of {self.expr(node.iterable)}"
            else:
                if node.init is None:
                    init = ""
                elif node.init.kind == "VarDecl":
                    init = self.stmt(node.init, 0).strip().rstrip(";")
                else:
                    init = self.expr(node.init)
                test = "" if node.test is None else self.expr(node.test)
                update = "" if node.update is None else self.expr(node.update)
                head = f"{init}; {test}; {update}"
            return f"{pad}for ({head}) {self.block(node.body, depth)}\n"
        if k == "Return":
            if node.value is None:
                return f"{pad}return;\n"
            return f"{pad}return {self.expr(node.value)};\n"
        if k == "ExportStmt":
            return f"{pad}module.exports = {self.expr(node.value)};\n"
        text = self.expr(node)
        # keep object literals and function expressions from reading as statements
        if k in ("ObjectLiteral", "FunctionExpr"):
            text = f"({text})"
        return f"{pad}{text};\n"

    def key_suffix(self, key, computed: bool) -> str:
        if computed:
            return f"[{self.expr(key)}]"
        return f".{key}"

    def expr(self, node: A.Node) -> str:
        k = node.kind
        if k == "Literal":
            v = node.value
            if v is UNDEFINED:
                return "undefined"
            if v is None:
                return "null"
            if v is True:
                return "true"
            if v is False:
                return "false"
            if isinstance(v, str):
                return quote(v)
            if v < 0 or v != v or v in (float("inf"), float("-inf")):
                raise ValueError(f"number literal {v!r} has no source form")
            return format_number(v)
        if k == "Identifier":
            return node.name
        if k == "ArrayLiteral":
            return "[" + ", ".join(self.expr(e) for e in node.elements) + "]"
        if k == "ObjectLiteral":
            parts = []
            for key, value in node.props:
                name = key if _IDENT.match(key) else quote(key)
                parts.append(f"{name}: {self.expr(value)}")
            return "{" + ", ".join(parts) + "}"
        if k == "FunctionExpr":
            name = f" {node.name}" if node.name else ""
            body = self.block(node.body, 0).replace("\n", " ").strip()
            return f"function{name}({', '.join(node.params)}) {body}"
        if k == "MemberRead":
            return self.operand(node.obj) + self.key_suffix(node.key, node.computed)
        if k == "MemberWrite":
            target = self.operand(node.obj) + self.key_suffix(node.key, node.computed)
            return f"({target} = {self.expr(node.value)})"
        if k == "Assign":
            return f"({node.name} = {self.expr(node.value)})"
        if k == "Call":
            return self.operand(node.callee) + "(" + ", ".join(self.expr(a) for a in node.args) + ")"
        if k == "MethodCall":
            head = self.operand(node.obj) + self.key_suffix(node.key, node.computed)
            return head + "(" + ", ".join(self.expr(a) for a in node.args) + ")"
        if k == "RequireExpr":
            return f"require({self.expr(node.arg)})"
        if k == "Binary":
            return f"({self.expr(node.left)} {node.op} {self.expr(node.right)})"
        if k == "Unary":
            sep = " " if node.op == "typeof" else ""
            return f"({node.op}{sep}{self.expr(node.operand)})"
        if k in A.LOGICAL_KINDS:
            op = {"LogicalOr": "||", "LogicalAnd": "&&", "NullishCoalesce": "??"}[k]
            return f"({self.expr(node.left)} {op} {self.expr(node.right)})"
        if k == "Ternary":
            return f"({self.expr(node.test)} ? {self.expr(node.then)} : {self.expr(node.other)})"
        raise ValueError(f"cannot print {k} as an expression")

    def operand(self, node: A.Node) -> str:
        """Expression in callee/object position of a member chain."""
        if node.kind in ("Identifier", "MemberRead", "Call", "MethodCall", "RequireExpr", "ArrayLiteral"):
            return self.expr(node)
        if node.kind == "Literal" and isinstance(node.value, str):
            return self.expr(node)
        return f"({self.expr(node)})"
