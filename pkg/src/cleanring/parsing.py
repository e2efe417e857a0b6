"""Tokenizer and recursive-descent parser for the expression syntax shared by
scalars, free-algebra polynomials, Laurent polynomials and matrix literals.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' ['-'] INT)?
    atom   := INT | NAME | '(' expr ')'

The parser only builds an AST; callers evaluate it against their own algebra
through :func:`evaluate`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Callable, Protocol


class ParseError(ValueError):
    """Syntax or semantic error located at ``line``/``column`` (both 1-based)."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


@dataclass(frozen=True)
class Token:
    kind: str  # 'int', 'name', 'op', 'end'
    text: str
    offset: int


@dataclass(frozen=True)
class Node:
    kind: str  # 'num', 'var', 'add', 'sub', 'mul', 'div', 'neg', 'pow'
    args: tuple
    offset: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            tokens.append(Token("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(Token("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                line, col = locate(text, m.start(3))
                raise ParseError(f"unexpected character {ch!r}", line, col)
            tokens.append(Token("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


def locate(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def error(self, message: str, offset: int) -> ParseError:
        line, col = locate(self.text, offset)
        return ParseError(message, line, col)

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def accept(self, op: str) -> Token | None:
        if self.tok.kind == "op" and self.tok.text == op:
            return self.take()
        return None

    def parse(self) -> Node:
        if self.tok.kind == "end":
            raise self.error("empty input", 0)
        node = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected token {self.tok.text!r}", self.tok.offset)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            t = self.take()
            rhs = self.term()
            node = Node("add" if t.text == "+" else "sub", (node, rhs), t.offset)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            t = self.take()
            rhs = self.unary()
            node = Node("mul" if t.text == "*" else "div", (node, rhs), t.offset)
        return node

    def unary(self) -> Node:
        t = self.accept("-")
        if t is not None:
            return Node("neg", (self.unary(),), t.offset)
        if self.accept("+") is not None:
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        t = self.accept("^")
        if t is None:
            return base
        sign = 1
        if self.accept("-") is not None:
            sign = -1
        if self.tok.kind == "op" and self.tok.text == "(":
            # t^(-1) style
            self.take()
            if self.accept("-") is not None:
                sign = -sign
            exp_tok = self.tok
            if exp_tok.kind != "int":
                raise self.error("malformed exponent", exp_tok.offset)
            self.take()
            if self.accept(")") is None:
                raise self.error("expected ')'", self.tok.offset)
        else:
            exp_tok = self.tok
            if exp_tok.kind != "int":
                raise self.error("malformed exponent", exp_tok.offset)
            self.take()
        return Node("pow", (base, sign * int(exp_tok.text)), t.offset)

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "int":
            self.take()
            return Node("num", (int(t.text),), t.offset)
        if t.kind == "name":
            self.take()
            if self.tok.kind in ("int", "name") or (self.tok.kind == "op" and self.tok.text == "("):
                raise self.error("missing '*' between factors", self.tok.offset)
            return Node("var", (t.text,), t.offset)
        if self.accept("(") is not None:
            node = self.expr()
            if self.accept(")") is None:
                raise self.error("expected ')'", self.tok.offset)
            return node
        if t.kind == "end":
            raise self.error("unexpected end of input", t.offset)
        raise self.error(f"unexpected token {t.text!r}", t.offset)


def parse(text: str) -> Node:
    return _Parser(text).parse()


class Algebra(Protocol):
    def const(self, n: int) -> Any: ...
    def var(self, name: str) -> Any: ...
    def add(self, x: Any, y: Any) -> Any: ...
    def sub(self, x: Any, y: Any) -> Any: ...
    def mul(self, x: Any, y: Any) -> Any: ...
    def neg(self, x: Any) -> Any: ...
    def div(self, x: Any, y: Any) -> Any: ...
    def pow(self, x: Any, n: int) -> Any: ...


def evaluate(text: str, algebra: Algebra) -> Any:
    """Parse ``text`` and fold it through ``algebra``.

    Errors raised by the algebra as ``ValueError`` or ``ZeroDivisionError``
    are re-raised as :class:`ParseError` pointing at the offending node.
    """
    root = parse(text)

    def ev(node: Node) -> Any:
        try:
            k = node.kind
            if k == "num":
                return algebra.const(node.args[0])
            if k == "var":
                return algebra.var(node.args[0])
            if k == "neg":
                return algebra.neg(ev(node.args[0]))
            if k == "pow":
                return algebra.pow(ev(node.args[0]), node.args[1])
            x, y = ev(node.args[0]), ev(node.args[1])
            op: Callable = getattr(algebra, k)
            return op(x, y)
        except ParseError:
            raise
        except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
            line, col = locate(text, node.offset)
            raise ParseError(str(exc), line, col) from exc

    return ev(root)


def split_top_level(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside any bracket nesting."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_matrix_literal(text: str) -> list[list[str]]:
    """``[[e,e],[e,e]]`` -> rows of entry strings (entries unparsed)."""
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError("matrix literal must look like [[..],[..]]", 1, 1)
    rows = []
    for part in split_top_level(s[1:-1]):
        part = part.strip()
        if not (part.startswith("[") and part.endswith("]")):
            raise ParseError(f"malformed matrix row {part!r}", 1, 1)
        rows.append([e.strip() for e in split_top_level(part[1:-1])])
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise ParseError("matrix literal must be square and non-empty", 1, 1)
    return rows
