"""Pratt parser for the expression grammar.

Grammar::

    expr    := expr ('+' | '-') expr | expr ('*' | '/') expr
             | expr '^' expr            (right associative)
             | '-' expr                 (binds below '^')
             | INT | NAME | FUNC '(' expr ')' | '(' expr ')'

Numbers are decimal integers; ratios such as ``3/4`` are quotients of
integers and fold to exact rational constants.  Implicit multiplication
is not supported.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .expr import CONST, FUNCTIONS, Expr, add, const, div, func, mul, neg, power, sub, sym
from .jet import JetContext

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*(?:_\[[0-9,\s]*\])?)|(?P<op>[-+*/^()])"
)

# left binding powers of infix operators
_LBP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}
_UNARY_MINUS = 25
_INFIX = frozenset(_LBP)
_EXPECT_OPERAND = frozenset({"integer", "name", "function", "(", "-"})


class ParseDiagnostic(ValueError):
    """A located parse error.

    ``offset`` is a byte offset into the parsed source; ``line`` and
    ``column`` are 1-based.
    """

    def __init__(self, message: str, offset: int, source: str, expected=()):
        self.message = message
        self.offset = offset
        self.expected = tuple(sorted(expected))
        before = source[: offset]
        self.line = before.count("\n") + 1
        self.column = offset - (before.rfind("\n") + 1) + 1
        super().__init__(str(self))

    def relocate(self, base: int, line: int, column: int) -> "ParseDiagnostic":
        """Shift a diagnostic from an embedded expression into file coordinates."""
        self.offset += base
        if self.line == 1:
            self.column += column - 1
        self.line += line - 1
        self.args = (str(self),)
        return self

    def to_dict(self) -> dict:
        return {
            "message": self.message,
            "offset": self.offset,
            "line": self.line,
            "column": self.column,
            "expected": list(self.expected),
        }

    def __str__(self):
        exp = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        return f"{self.line}:{self.column}: {self.message}{exp}"


@dataclass(frozen=True)
class Token:
    kind: str  # 'int', 'name', 'op', 'end'
    text: str
    offset: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseDiagnostic(f"unexpected character {text[pos]!r}", pos, text, _EXPECT_OPERAND | _INFIX)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), pos))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, ctx: JetContext | None):
        self.text = text
        self.ctx = ctx
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, message, tok: Token, expected=()):
        raise ParseDiagnostic(message, tok.offset, self.text, expected)

    def expect(self, text: str):
        t = self.tok
        if t.kind == "op" and t.text == text:
            return self.advance()
        self.error(f"expected {text!r}", t, {text})

    def parse(self) -> Expr:
        if self.tok.kind == "end":
            self.error("empty expression", self.tok, _EXPECT_OPERAND)
        e = self.expression(0)
        t = self.tok
        if t.kind != "end":
            if t.kind == "op" and t.text == ")":
                self.error("unbalanced ')'", t, _INFIX | {"end"})
            self.error("expected operator", t, _INFIX | {"end"})
        return e

    def expression(self, rbp: int) -> Expr:
        left = self.prefix()
        while True:
            t = self.tok
            if t.kind != "op" or t.text not in _INFIX or _LBP[t.text] <= rbp:
                if t.kind in ("int", "name") or (t.kind == "op" and t.text == "("):
                    self.error("expected operator", t, _INFIX | {"end"})
                return left
            self.advance()
            op = t.text
            if op == "^":
                right = self.expression(_LBP["^"] - 1)
            else:
                right = self.expression(_LBP[op])
            left = self.infix(op, left, right, t)

    def infix(self, op, a, b, tok):
        if op == "+":
            return add(a, b)
        if op == "-":
            return sub(a, b)
        if op == "*":
            return mul(a, b)
        if op == "/":
            if b.kind == CONST and b.value == 0:
                self.error("division by zero", tok)
            return div(a, b)
        if a.kind == CONST and a.value == 0 and b.kind == CONST and b.value <= 0:
            self.error("zero to a non-positive power", tok)
        return power(a, b)

    def prefix(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return const(int(t.text))
        if t.kind == "name":
            self.advance()
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expression(0)
                self.expect(")")
                return func(t.text, arg)
            return self.name(t)
        if t.kind == "op" and t.text == "(":
            self.advance()
            e = self.expression(0)
            self.expect(")")
            return e
        if t.kind == "op" and t.text == "-":
            self.advance()
            return neg(self.expression(_UNARY_MINUS))
        if t.kind == "end":
            self.error("unexpected end of input", t, _EXPECT_OPERAND)
        self.error(f"unexpected {t.text!r}", t, _EXPECT_OPERAND)

    def name(self, t: Token) -> Expr:
        if self.ctx is None:
            return sym(t.text)
        canon = self.ctx.canonical_name(t.text)
        if canon is None:
            self.error(f"undeclared symbol {t.text!r}", t)
        if canon != t.text:
            self.error(f"non-canonical coordinate name {t.text!r}, write {canon!r}", t)
        return sym(canon)


def parse_expression(text: str, ctx: JetContext | None = None) -> Expr:
    """Parse ``text``; raises :class:`ParseDiagnostic` on error."""
    return _Parser(text, ctx).parse()


def try_parse(text: str, ctx: JetContext | None = None):
    """Expr on success, the ParseDiagnostic otherwise."""
    try:
        return parse_expression(text, ctx)
    except ParseDiagnostic as d:
        return d
