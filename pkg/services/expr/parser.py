"""
Recursive-descent parser for the expression language.

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?
    atom  := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'

'^' binds tighter than unary minus and is right-associative, so ``-r^2`` is
``-(r^2)`` and ``2^3^2`` is ``2^(3^2)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import List, Sequence

from core.errors import ArityError, ExpressionSyntaxError, UnknownIdentifier
from services.expr.nodes import (
    CONSTANTS,
    FUNCTIONS,
    BinOp,
    Expr,
    Var,
    call,
    fold,
    neg,
    num,
)

_TOKEN = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[a-zA-Z_][a-zA-Z0-9_]*)"
    r"|(?P<op>[-+*/^(),]))"
)

_ATOM_START = {"number", "identifier", "(", "-"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if not match:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExpressionSyntaxError(start, ["number", "identifier", "operator"], text[start])
        kind = match.lastgroup
        start = match.start(kind)
        if kind == "number" and not math.isfinite(float(match.group(kind))):
            raise ExpressionSyntaxError(start, ["finite number"], match.group(kind))
        tokens.append(Token(kind, match.group(kind), start))
        pos = match.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class Parser:
    def __init__(self, text: str, coords: Sequence[str]) -> None:
        self.text = text
        self.coords = list(coords)
        self.tokens = tokenize(text)
        self.current = 0

    def peek(self) -> Token:
        return self.tokens[self.current]

    def advance(self) -> Token:
        token = self.tokens[self.current]
        if token.kind != "eof":
            self.current += 1
        return token

    def check(self, *ops: str) -> bool:
        token = self.peek()
        return token.kind == "op" and token.text in ops

    def expect(self, op: str) -> Token:
        if not self.check(op):
            token = self.peek()
            raise ExpressionSyntaxError(token.position, [op], token.text)
        return self.advance()

    def parse(self) -> Expr:
        node = self.expression()
        token = self.peek()
        if token.kind != "eof":
            raise ExpressionSyntaxError(token.position, ["+", "-", "*", "/", "^", "end of input"], token.text)
        return node

    def expression(self) -> Expr:
        node = self.term()
        while self.check("+", "-"):
            op = self.advance().text
            node = fold(BinOp(op, node, self.term()))
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.check("*", "/"):
            op = self.advance().text
            node = fold(BinOp(op, node, self.unary()))
        return node

    def unary(self) -> Expr:
        if self.check("-"):
            self.advance()
            return neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.check("^"):
            self.advance()
            return fold(BinOp("^", base, self.unary()))
        return base

    def atom(self) -> Expr:
        token = self.peek()
        if token.kind == "number":
            self.advance()
            return num(float(token.text))
        if token.kind == "ident":
            self.advance()
            if self.check("("):
                return self.call(token)
            if token.text in self.coords:
                return Var(token.text, self.coords.index(token.text))
            if token.text in CONSTANTS:
                return num(CONSTANTS[token.text])
            raise UnknownIdentifier(token.text, token.position)
        if self.check("("):
            self.advance()
            node = self.expression()
            self.expect(")")
            return node
        raise ExpressionSyntaxError(token.position, _ATOM_START, token.text)

    def call(self, name: Token) -> Expr:
        if name.text not in FUNCTIONS:
            raise UnknownIdentifier(name.text, name.position)
        self.expect("(")
        args = [self.expression()]
        while self.check(","):
            self.advance()
            args.append(self.expression())
        self.expect(")")
        arity, _ = FUNCTIONS[name.text]
        if len(args) != arity:
            raise ArityError(name.text, arity, len(args), name.position)
        return call(name.text, *args)


def parse(text: str, coords: Sequence[str]) -> Expr:
    if not text or not text.strip():
        raise ExpressionSyntaxError(0, _ATOM_START)
    if len(coords) != 3:
        raise ValueError("expressions are defined over exactly three coordinates")
    return Parser(text, coords).parse()
