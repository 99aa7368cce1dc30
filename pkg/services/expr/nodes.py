"""
Immutable AST for the scalar expression language plus its printed normal form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Tuple, Union

from core.errors import PlaneFieldError
from utils.jet import dsmoothstep, smoothstep

CONSTANTS: Dict[str, float] = {"pi": math.pi}

# name -> (arity, scalar implementation used for constant folding)
FUNCTIONS: Dict[str, Tuple[int, Callable[..., float]]] = {
    "sin": (1, math.sin),
    "cos": (1, math.cos),
    "exp": (1, math.exp),
    "sqrt": (1, math.sqrt),
    "smoothstep": (3, smoothstep),
    "dsmoothstep": (3, dsmoothstep),
}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str
    index: int


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Expr", ...]


Expr = Union[Num, Var, Neg, BinOp, Call]

_ARITH: Dict[str, Callable[[float, float], float]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
}


def _power(a: float, b: float) -> float:
    if not float(b).is_integer() and a <= 0:
        raise ValueError("non-integer power of non-positive base")
    return float(a) ** float(b)


def _finite(value: float, node: Expr) -> Expr:
    return Num(value) if math.isfinite(value) else node


def fold(node: Expr) -> Expr:
    """Collapse a node whose children are all literals; leave it alone if evaluation fails or overflows."""
    try:
        if isinstance(node, Neg) and isinstance(node.operand, Num):
            return Num(-node.operand.value)
        if isinstance(node, BinOp) and isinstance(node.left, Num) and isinstance(node.right, Num):
            if node.op == "^":
                return _finite(_power(node.left.value, node.right.value), node)
            return _finite(float(_ARITH[node.op](node.left.value, node.right.value)), node)
        if isinstance(node, Call) and all(isinstance(a, Num) for a in node.args):
            _, impl = FUNCTIONS[node.name]
            return _finite(float(impl(*(a.value for a in node.args))), node)
    except (ArithmeticError, ValueError, PlaneFieldError):
        return node
    return node


def num(value: float) -> Num:
    return Num(float(value))


def add(a: Expr, b: Expr) -> Expr:
    return fold(BinOp("+", a, b))


def sub(a: Expr, b: Expr) -> Expr:
    return fold(BinOp("-", a, b))


def mul(a: Expr, b: Expr) -> Expr:
    return fold(BinOp("*", a, b))


def div(a: Expr, b: Expr) -> Expr:
    return fold(BinOp("/", a, b))


def power(a: Expr, b: Expr) -> Expr:
    return fold(BinOp("^", a, b))


def neg(a: Expr) -> Expr:
    return fold(Neg(a))


def call(name: str, *args: Expr) -> Expr:
    return fold(Call(name, tuple(args)))


def substitute(node: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace coordinate identifiers by expressions, refolding on the way up."""
    if isinstance(node, Var):
        return mapping.get(node.name, node)
    if isinstance(node, Num):
        return node
    if isinstance(node, Neg):
        return neg(substitute(node.operand, mapping))
    if isinstance(node, BinOp):
        return fold(BinOp(node.op, substitute(node.left, mapping), substitute(node.right, mapping)))
    return call(node.name, *(substitute(a, mapping) for a in node.args))


def depends_on(node: Expr, index: int) -> bool:
    if isinstance(node, Var):
        return node.index == index
    if isinstance(node, Num):
        return False
    if isinstance(node, Neg):
        return depends_on(node.operand, index)
    if isinstance(node, BinOp):
        return depends_on(node.left, index) or depends_on(node.right, index)
    return any(depends_on(a, index) for a in node.args)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_UNARY = 3
_ATOM = 5


def _precedence(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _UNARY
    if isinstance(node, Num) and (node.value < 0 or math.copysign(1.0, node.value) < 0):
        return _UNARY
    return _ATOM


def _wrap(node: Expr, minimum: int) -> str:
    text = to_text(node)
    if _precedence(node) < minimum:
        return f"({text})"
    return text


def to_text(node: Expr) -> str:
    """Print the normal form; parsing the result reproduces the same AST."""
    if isinstance(node, Num):
        if node.value < 0 or math.copysign(1.0, node.value) < 0:
            return f"-{repr(-node.value)}"
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _UNARY)
    if isinstance(node, BinOp):
        if node.op == "^":
            return f"{_wrap(node.left, _ATOM)}^{_wrap(node.right, _UNARY)}"
        prec = _PREC[node.op]
        return f"{_wrap(node.left, prec)} {node.op} {_wrap(node.right, prec + 1)}"
    return f"{node.name}({', '.join(to_text(a) for a in node.args)})"
