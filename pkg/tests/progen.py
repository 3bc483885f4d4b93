"""Seeded generator of taint-free MiniJS programs.

Every property read in a generated program targets a key that is known to be
defined, so a correct taint analysis injects nothing and must leave the run
unchanged.
"""

from __future__ import annotations

import random


class ProgramGenerator:
    def __init__(self, seed: int):
        self.r = random.Random(seed)
        self.nums: list[str] = []
        self.strs: list[str] = []
        self.arrs: list[str] = []
        self.objs: dict[str, list[str]] = {}
        self.funcs: list[str] = []
        self.counter = 0
        self.lines: list[str] = []

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    # -- expressions ----------------------------------------------------------

    def num(self, depth: int = 2) -> str:
        r = self.r
        options = ["lit"]
        if self.nums:
            options += ["var", "var"]
        if depth > 0:
            options += ["bin", "bin"]
        if self.objs and depth > 0:
            options.append("objread")
        if self.funcs and depth > 0:
            options.append("call")
        if self.arrs:
            options.append("len")
        kind = r.choice(options)
        if kind == "lit":
            return str(r.randint(0, 20))
        if kind == "var":
            return r.choice(self.nums)
        if kind == "bin":
            op = r.choice(["+", "-", "*", "%"])
            right = self.num(depth - 1)
            if op == "%":
                right = f"({right} + 1)"
            return f"({self.num(depth - 1)} {op} {right})"
        if kind == "objread":
            name = r.choice(list(self.objs))
            key = r.choice(self.objs[name])
            return f"({name}.{key} ?? 0)"
        if kind == "call":
            return f"{r.choice(self.funcs)}({self.num(depth - 1)})"
        return f"{r.choice(self.arrs)}.length"

    def text(self, depth: int = 2) -> str:
        r = self.r
        options = ["lit"]
        if self.strs:
            options += ["var", "var"]
        if depth > 0:
            options += ["concat", "method", "join", "typeof", "ternary"]
        kind = r.choice(options)
        if kind == "lit":
            return '"' + r.choice(["a", "bc", "de-f", "x y", "", "Z"]) + '"'
        if kind == "var":
            return r.choice(self.strs)
        if kind == "concat":
            return f"({self.text(depth - 1)} + {self.num(depth - 1)})"
        if kind == "method":
            base = self.text(depth - 1)
            return r.choice([f"{base}.toUpperCase()", f"{base}.slice(1)", f"{base}.trim()", f'{base}.concat("!")'])
        if kind == "join":
            return f'[{self.text(depth - 1)}, {self.num(depth - 1)}].join("|")'
        if kind == "typeof":
            return f"(typeof {r.choice([self.num(0), self.text(0), '[]', '{}'])})"
        return f"({self.cond(depth - 1)} ? {self.text(depth - 1)} : {self.text(depth - 1)})"

    def cond(self, depth: int = 1) -> str:
        r = self.r
        kind = r.choice(["cmp", "cmp", "eq", "logic", "not"] if depth > 0 else ["cmp", "eq"])
        if kind == "cmp":
            return f"{self.num(0)} {r.choice(['<', '<=', '>', '>=', '==='])} {self.num(0)}"
        if kind == "eq":
            return f"{self.text(0)} {r.choice(['===', '!=='])} {self.text(0)}"
        if kind == "logic":
            return f"({self.cond(depth - 1)} {r.choice(['&&', '||'])} {self.cond(depth - 1)})"
        return f"!({self.cond(depth - 1)})"

    # -- statements -----------------------------------------------------------

    def simple(self) -> str:
        """A statement that declares nothing (safe inside blocks)."""
        r = self.r
        options = ["log", "log", "host"]
        if self.nums:
            options.append("assign")
        if self.arrs:
            options.append("push")
        if self.objs:
            options.append("write")
        kind = r.choice(options)
        if kind == "log":
            return f"std.console.log({self.text()}, {self.num()});"
        if kind == "host":
            return r.choice(
                [
                    f'cp.exec("echo " + {self.text()});',
                    f'fs.writeFile("out.txt", {self.text()});',
                    f'cp.spawn("node", [{self.text()}], {{shell: false, env: {{}}}});',
                    f'std.console.log(util.format("%s-%s", {self.text()}, {self.num()}));',
                    f"fs.existsSync({self.text()});",
                ]
            )
        if kind == "assign":
            return f"{r.choice(self.nums)} = {self.num()};"
        if kind == "push":
            return f"{r.choice(self.arrs)}.push({self.num()});"
        name = r.choice(list(self.objs))
        return f"{name}.{r.choice(self.objs[name])} = {self.num()};"

    def block(self, n: int) -> str:
        return " ".join(self.simple() for _ in range(n))

    def statement(self) -> None:
        r = self.r
        kind = r.choice(["num", "num", "str", "str", "arr", "obj", "if", "while", "forof", "func", "simple", "simple", "logical"])
        if kind == "num":
            name = self.fresh("n")
            self.lines.append(f"let {name} = {self.num()};")
            self.nums.append(name)
        elif kind == "str":
            name = self.fresh("s")
            self.lines.append(f"let {name} = {self.text()};")
            self.strs.append(name)
        elif kind == "arr":
            name = self.fresh("a")
            items = ", ".join(self.num(1) for _ in range(r.randint(0, 3)))
            self.lines.append(f"let {name} = [{items}];")
            self.arrs.append(name)
        elif kind == "obj":
            name = self.fresh("o")
            keys = r.sample(["k", "m", "path", "cmd", "shell"], r.randint(1, 3))
            body = ", ".join(f"{k}: {self.num(1)}" for k in keys)
            self.lines.append(f"let {name} = {{{body}}};")
            self.objs[name] = keys
        elif kind == "if":
            self.lines.append(f"if ({self.cond()}) {{ {self.block(2)} }} else {{ {self.block(1)} }}")
        elif kind == "while":
            i = self.fresh("i")
            self.lines.append(f"let {i} = 0; while ({i} < {r.randint(0, 4)}) {{ {self.block(1)} {i} = {i} + 1; }}")
        elif kind == "forof" and self.arrs:
            x = self.fresh("x")
            self.lines.append(f"for (let {x} of {r.choice(self.arrs)}) {{ std.console.log({x}); }}")
        elif kind == "func":
            name = self.fresh("f")
            self.lines.append(f"function {name}(v) {{ return v * 2 + {r.randint(0, 5)}; }}")
            self.funcs.append(name)
        elif kind == "logical":
            name = self.fresh("s")
            self.lines.append(f"let {name} = {self.text(0)} || {self.text(0)};")
            self.strs.append(name)
        else:
            self.lines.append(self.simple())

    def program(self, size: int | None = None) -> str:
        self.lines = [
            'let cp = require("child_process");',
            'let fs = require("fs");',
            'let util = require("util");',
        ]
        for _ in range(size or self.r.randint(8, 25)):
            self.statement()
        return "\n".join(self.lines) + "\n"


def generate(seed: int) -> str:
    return ProgramGenerator(seed).program()
