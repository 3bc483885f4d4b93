"""AST node types for MiniJS.

Every node carries a :class:`SourceLocation` and an integer id that is unique
within one parsed file. Ids are assigned in construction order, so parsing the
same bytes twice yields the same ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Any, ClassVar, Iterator, Union


class _Undefined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "undefined"

    def __bool__(self) -> bool:
        return False

    def __reduce__(self):
        return (_Undefined, ())


UNDEFINED = _Undefined()


@dataclass(frozen=True, order=True)
class SourceLocation:
    file: str
    line: int
    column: int
    byte_start: int
    byte_end: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"

    def to_dict(self) -> dict:
        return {
            "file": self.file,
            "line": self.line,
            "column": self.column,
            "byteStart": self.byte_start,
            "byteEnd": self.byte_end,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SourceLocation":
        return cls(d["file"], d["line"], d["column"], d["byteStart"], d["byteEnd"])

    def span(self, end: "SourceLocation") -> "SourceLocation":
        """Location covering ``self`` through ``end``."""
        return SourceLocation(self.file, self.line, self.column, self.byte_start, end.byte_end)


@dataclass(eq=False)
class Node:
    kind: ClassVar[str] = "Node"
    loc: SourceLocation
    id: int = field(default=-1, kw_only=True)

    def children(self) -> Iterator["Node"]:
        for f in fields(self):
            if f.name in ("loc", "id"):
                continue
            yield from _iter_nodes(getattr(self, f.name))

    def walk(self) -> Iterator["Node"]:
        yield self
        for child in self.children():
            yield from child.walk()


def _iter_nodes(value: Any) -> Iterator[Node]:
    if isinstance(value, Node):
        yield value
    elif isinstance(value, (list, tuple)):
        for item in value:
            yield from _iter_nodes(item)


@dataclass(eq=False)
class Program(Node):
    kind: ClassVar[str] = "Program"
    body: list
    file: str = ""


@dataclass(eq=False)
class FunctionDecl(Node):
    kind: ClassVar[str] = "FunctionDecl"
    name: str
    params: list
    body: list


@dataclass(eq=False)
class FunctionExpr(Node):
    kind: ClassVar[str] = "FunctionExpr"
    name: str | None
    params: list
    body: list


@dataclass(eq=False)
class VarDecl(Node):
    kind: ClassVar[str] = "VarDecl"
    name: str
    init: Node | None


@dataclass(eq=False)
class Assign(Node):
    kind: ClassVar[str] = "Assign"
    name: str
    value: Node


@dataclass(eq=False)
class Identifier(Node):
    kind: ClassVar[str] = "Identifier"
    name: str


@dataclass(eq=False)
class Literal(Node):
    kind: ClassVar[str] = "Literal"
    # float | str | bool | None (null) | UNDEFINED
    value: Any


@dataclass(eq=False)
class ObjectLiteral(Node):
    kind: ClassVar[str] = "ObjectLiteral"
    props: list  # list of (key, Node)


@dataclass(eq=False)
class ArrayLiteral(Node):
    kind: ClassVar[str] = "ArrayLiteral"
    elements: list


Key = Union[str, Node]


@dataclass(eq=False)
class MemberRead(Node):
    kind: ClassVar[str] = "MemberRead"
    obj: Node
    key: Key
    computed: bool = False


@dataclass(eq=False)
class MemberWrite(Node):
    kind: ClassVar[str] = "MemberWrite"
    obj: Node
    key: Key
    computed: bool
    value: Node


@dataclass(eq=False)
class Call(Node):
    kind: ClassVar[str] = "Call"
    callee: Node
    args: list


@dataclass(eq=False)
class MethodCall(Node):
    kind: ClassVar[str] = "MethodCall"
    obj: Node
    key: Key
    computed: bool
    args: list


@dataclass(eq=False)
class Binary(Node):
    kind: ClassVar[str] = "Binary"
    op: str
    left: Node
    right: Node


@dataclass(eq=False)
class Unary(Node):
    kind: ClassVar[str] = "Unary"
    op: str
    operand: Node


@dataclass(eq=False)
class LogicalOr(Node):
    kind: ClassVar[str] = "LogicalOr"
    left: Node
    right: Node


@dataclass(eq=False)
class LogicalAnd(Node):
    kind: ClassVar[str] = "LogicalAnd"
    left: Node
    right: Node


@dataclass(eq=False)
class NullishCoalesce(Node):
    kind: ClassVar[str] = "NullishCoalesce"
    left: Node
    right: Node


@dataclass(eq=False)
class Ternary(Node):
    kind: ClassVar[str] = "Ternary"
    test: Node
    then: Node
    other: Node


@dataclass(eq=False)
class If(Node):
    kind: ClassVar[str] = "If"
    test: Node
    then: list
    other: list | None = None


@dataclass(eq=False)
class While(Node):
    kind: ClassVar[str] = "While"
    test: Node
    body: list


@dataclass(eq=False)
class For(Node):
    """C-style ``for (init; test; update)`` or, when ``each`` is set, ``for (let each of iterable)``."""

    kind: ClassVar[str] = "For"
    init: Node | None
    test: Node | None
    update: Node | None
    body: list
    each: str | None = None
    iterable: Node | None = None


@dataclass(eq=False)
class Return(Node):
    kind: ClassVar[str] = "Return"
    value: Node | None


@dataclass(eq=False)
class RequireExpr(Node):
    kind: ClassVar[str] = "RequireExpr"
    arg: Node


@dataclass(eq=False)
class ExportStmt(Node):
    kind: ClassVar[str] = "ExportStmt"
    value: Node


LOGICAL_KINDS = ("LogicalOr", "LogicalAnd", "NullishCoalesce")


def strip_locations(node: Any) -> Any:
    """Structural form of a tree with ids and locations removed.

    Two trees are equal modulo locations iff their stripped forms are equal.
    """
    if isinstance(node, Node):
        parts = [node.kind]
        for f in fields(node):
            if f.name in ("loc", "id", "file"):
                continue
            parts.append((f.name, strip_locations(getattr(node, f.name))))
        return tuple(parts)
    if isinstance(node, (list, tuple)):
        return tuple(strip_locations(x) for x in node)
    if isinstance(node, float):
        return ("num", node)
    return node
