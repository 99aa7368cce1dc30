from services.expr.evaluator import eval_jet, eval_value
from services.expr.nodes import (
    BinOp,
    Call,
    Expr,
    Neg,
    Num,
    Var,
    add,
    call,
    depends_on,
    div,
    mul,
    neg,
    num,
    power,
    sub,
    substitute,
    to_text,
)
from services.expr.parser import parse, tokenize
from utils.jet import Jet, dsmoothstep, smoothstep

__all__ = [
    "BinOp",
    "Call",
    "Expr",
    "Jet",
    "Neg",
    "Num",
    "Var",
    "add",
    "call",
    "depends_on",
    "div",
    "dsmoothstep",
    "eval_jet",
    "eval_value",
    "mul",
    "neg",
    "num",
    "parse",
    "power",
    "smoothstep",
    "sub",
    "substitute",
    "to_text",
    "tokenize",
]
