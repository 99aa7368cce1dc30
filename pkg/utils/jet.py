"""
First-order forward-mode jets.

A ``Jet`` carries a value and the exact partial derivatives with respect to
the three chart coordinates. Values may be scalars or numpy arrays of any
shape; the gradient always has one extra trailing axis of length 3, so a
whole sample grid is differentiated in one vectorized pass.
"""

from __future__ import annotations

from typing import Tuple, Union

import numpy as np

from core.errors import DomainError

DIM = 3
Number = Union[int, float, np.floating]


def _first(values: np.ndarray, mask: np.ndarray) -> float:
    return float(np.asarray(values)[mask].flat[0])


class Jet:
    __slots__ = ("value", "grad")

    def __init__(self, value, grad) -> None:
        self.value = np.asarray(value, dtype=float)
        self.grad = np.asarray(grad, dtype=float)

    @classmethod
    def constant(cls, c: Number, shape: Tuple[int, ...] = ()) -> "Jet":
        return cls(np.full(shape, float(c)), np.zeros(tuple(shape) + (DIM,)))

    @classmethod
    def variable(cls, values, index: int) -> "Jet":
        values = np.asarray(values, dtype=float)
        grad = np.zeros(values.shape + (DIM,))
        grad[..., index] = 1.0
        return cls(values, grad)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        arr = np.asarray(other, dtype=float)
        shape = np.broadcast_shapes(arr.shape, self.value.shape)
        return Jet(np.broadcast_to(arr, shape), np.zeros(shape + (DIM,)))

    def __repr__(self) -> str:
        return f"Jet(value={self.value!r}, grad={self.grad!r})"

    def __add__(self, other) -> "Jet":
        other = self._lift(other)
        return Jet(self.value + other.value, self.grad + other.grad)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        other = self._lift(other)
        return Jet(self.value - other.value, self.grad - other.grad)

    def __rsub__(self, other) -> "Jet":
        return self._lift(other) - self

    def __neg__(self) -> "Jet":
        return Jet(-self.value, -self.grad)

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            c = np.asarray(other, dtype=float)
            return Jet(self.value * c, self.grad * c[..., None])
        return Jet(
            self.value * other.value,
            self.grad * other.value[..., None] + other.grad * self.value[..., None],
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        other = self._lift(other)
        zero = other.value == 0
        if np.any(zero):
            raise DomainError("/", 0.0)
        inv = 1.0 / other.value
        value = self.value * inv
        grad = (self.grad - other.grad * value[..., None]) * inv[..., None]
        return Jet(value, grad)

    def __rtruediv__(self, other) -> "Jet":
        return self._lift(other) / self

    def __pow__(self, exponent) -> "Jet":
        if isinstance(exponent, Jet):
            if not np.any(exponent.grad):
                flat = np.unique(exponent.value)
                if flat.size == 1:
                    return self ** float(flat[0])
            return (self.log() * exponent).exp()
        n = float(exponent)
        if n.is_integer():
            k = int(n)
            if k == 0:
                return Jet.constant(1.0, self.shape)
            if k < 0 and np.any(self.value == 0):
                raise DomainError("^", 0.0)
            value = self.value ** k
            deriv = k * self.value ** (k - 1)
            return Jet(value, self.grad * deriv[..., None])
        bad = self.value <= 0
        if np.any(bad):
            raise DomainError("^", _first(self.value, bad))
        value = self.value ** n
        deriv = n * self.value ** (n - 1)
        return Jet(value, self.grad * deriv[..., None])

    def sin(self) -> "Jet":
        return Jet(np.sin(self.value), self.grad * np.cos(self.value)[..., None])

    def cos(self) -> "Jet":
        return Jet(np.cos(self.value), -self.grad * np.sin(self.value)[..., None])

    def exp(self) -> "Jet":
        e = np.exp(self.value)
        return Jet(e, self.grad * e[..., None])

    def log(self) -> "Jet":
        bad = self.value <= 0
        if np.any(bad):
            raise DomainError("log", _first(self.value, bad))
        return Jet(np.log(self.value), self.grad / self.value[..., None])

    def sqrt(self) -> "Jet":
        bad = self.value < 0
        if np.any(bad):
            raise DomainError("sqrt", _first(self.value, bad))
        root = np.sqrt(self.value)
        # sqrt is not differentiable at 0 unless the argument is stationary there
        kink = (root == 0) & np.any(self.grad != 0, axis=-1)
        if np.any(kink):
            raise DomainError("sqrt", 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(root > 0, 0.5 / np.where(root > 0, root, 1.0), 0.0)
        return Jet(root, self.grad * scale[..., None])

    @staticmethod
    def where(mask, a: "Jet", b: "Jet") -> "Jet":
        mask = np.asarray(mask, dtype=bool)
        return Jet(np.where(mask, a.value, b.value), np.where(mask[..., None], a.grad, b.grad))


def unit_step_parts(w) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Value, first and second derivative of the C-infinity step
    s(w) = sigma(w) / (sigma(w) + sigma(1 - w)), sigma(u) = exp(-1/u) for u > 0.
    """
    w = np.asarray(w, dtype=float)
    inside = (w > 0) & (w < 1)
    wc = np.clip(w, 1e-12, 1.0 - 1e-12)
    q = 1.0 / wc - 1.0 / (1.0 - wc)
    e = np.exp(-np.abs(q))
    s_in = np.where(q > 0, e / (1.0 + e), 1.0 / (1.0 + e))
    s_mix = e / (1.0 + e) ** 2
    p = 1.0 / wc**2 + 1.0 / (1.0 - wc) ** 2
    dp = -2.0 / wc**3 + 2.0 / (1.0 - wc) ** 3
    d1_in = s_mix * p
    d2_in = d1_in * (1.0 - 2.0 * s_in) * p + s_mix * dp
    s = np.where(w >= 1.0, 1.0, np.where(inside, s_in, 0.0))
    d1 = np.where(inside, d1_in, 0.0)
    d2 = np.where(inside, d2_in, 0.0)
    return s, d1, d2


def _as_jets(*args):
    shape = ()
    for arg in args:
        if isinstance(arg, Jet):
            shape = np.broadcast_shapes(shape, arg.shape)
    return [arg if isinstance(arg, Jet) else Jet.constant(arg, shape) for arg in args]


def _check_interval(a: Jet, b: Jet, name: str) -> None:
    bad = a.value >= b.value
    if np.any(bad):
        raise DomainError(name, [_first(a.value, bad), _first(b.value, bad)])


def smoothstep(a, b, x):
    """0 for x <= a, 1 for x >= b, smooth and strictly increasing in between."""
    if not any(isinstance(v, Jet) for v in (a, b, x)):
        if a >= b:
            raise DomainError("smoothstep", [float(a), float(b)])
        s, _, _ = unit_step_parts((x - a) / (b - a))
        return float(s) if np.ndim(s) == 0 else s
    a, b, x = _as_jets(a, b, x)
    _check_interval(a, b, "smoothstep")
    w = (x - a) / (b - a)
    s, d1, _ = unit_step_parts(w.value)
    return Jet(s, w.grad * d1[..., None])


def dsmoothstep(a, b, x):
    """Derivative of ``smoothstep(a, b, x)`` with respect to x."""
    if not any(isinstance(v, Jet) for v in (a, b, x)):
        if a >= b:
            raise DomainError("dsmoothstep", [float(a), float(b)])
        _, d1, _ = unit_step_parts((x - a) / (b - a))
        return (float(d1) if np.ndim(d1) == 0 else d1) / (b - a)
    a, b, x = _as_jets(a, b, x)
    _check_interval(a, b, "dsmoothstep")
    w = (x - a) / (b - a)
    _, d1, d2 = unit_step_parts(w.value)
    return Jet(d1, w.grad * d2[..., None]) / (b - a)


def stack(components) -> Tuple[np.ndarray, np.ndarray]:
    """Stack jets into (values[..., k], grads[..., k, 3])."""
    values = np.stack([c.value for c in components], axis=-1)
    grads = np.stack([c.grad for c in components], axis=-2)
    return values, grads
