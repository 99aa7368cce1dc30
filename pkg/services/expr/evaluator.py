from __future__ import annotations

from typing import Callable, Dict, Sequence

import numpy as np

from services.expr.nodes import BinOp, Call, Expr, Neg, Num, Var
from utils.jet import Jet, dsmoothstep, smoothstep

_CALLS: Dict[str, Callable[..., Jet]] = {
    "sin": Jet.sin,
    "cos": Jet.cos,
    "exp": Jet.exp,
    "sqrt": Jet.sqrt,
    "smoothstep": smoothstep,
    "dsmoothstep": dsmoothstep,
}


def _as_points(p) -> np.ndarray:
    points = np.asarray(p, dtype=float)
    if points.shape[-1] != 3:
        raise ValueError(f"points must have 3 coordinates, got shape {points.shape}")
    if not np.all(np.isfinite(points)):
        raise ValueError("points must be finite")
    return points


def _evaluate(node: Expr, variables: Sequence[Jet]) -> Jet:
    if isinstance(node, Num):
        return Jet.constant(node.value)
    if isinstance(node, Var):
        return variables[node.index]
    if isinstance(node, Neg):
        return -_evaluate(node.operand, variables)
    if isinstance(node, BinOp):
        left = _evaluate(node.left, variables)
        if node.op == "^" and isinstance(node.right, Num):
            return left ** node.right.value
        right = _evaluate(node.right, variables)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            return left / right
        return left ** right
    if isinstance(node, Call):
        args = [_evaluate(a, variables) for a in node.args]
        return _CALLS[node.name](*args)
    raise TypeError(f"not an expression node: {node!r}")


def eval_jet(e: Expr, p) -> Jet:
    """
    Evaluate ``e`` at a point (shape (3,)) or a batch of points (shape (..., 3)).
    The result's value has the batch shape and its gradient one extra axis of 3.
    """
    points = _as_points(p)
    batch = points.shape[:-1]
    variables = [Jet.variable(points[..., i], i) for i in range(3)]
    result = _evaluate(e, variables)
    if result.shape != batch:
        result = Jet(
            np.broadcast_to(result.value, batch).copy(),
            np.broadcast_to(result.grad, batch + (3,)).copy(),
        )
    return result


def eval_value(e: Expr, p) -> np.ndarray:
    return eval_jet(e, p).value
