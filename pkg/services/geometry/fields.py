"""
Tensor fields built from expressions: metrics, vector fields and 1-forms.
"""

from __future__ import annotations

from typing import Any, Protocol, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from services.expr import BinOp, Call, Neg, Num, Var, eval_jet, parse, to_text
from services.geometry.charts import Chart
from utils.jet import stack

_NODES = (Num, Var, Neg, BinOp, Call)

# upper triangle, row-major
METRIC_SLOTS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))


class MetricSource(Protocol):
    """Anything that yields metric values G[..., a, b] and partials dG[..., a, b, k] = d_k g_ab."""

    def jets(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]: ...


def check_nodes(values):
    for v in values:
        if not isinstance(v, _NODES):
            raise TypeError(f"expected expression nodes, got {type(v).__name__}")
    return tuple(values)


class MetricField(BaseModel):
    chart: Chart
    entries: Tuple[Any, Any, Any, Any, Any, Any]

    model_config = ConfigDict(frozen=True)

    @field_validator("entries")
    @classmethod
    def check_entries(cls, v):
        return check_nodes(v)

    @classmethod
    def from_strings(cls, chart: Chart, texts: Sequence[str]) -> "MetricField":
        if len(texts) != 6:
            raise ValueError("metric needs 6 upper-triangle entries")
        return cls(chart=chart, entries=tuple(parse(t, chart.coord_names) for t in texts))

    @classmethod
    def diagonal(cls, chart: Chart, g11: str, g22: str, g33: str) -> "MetricField":
        return cls.from_strings(chart, [g11, "0", "0", g22, "0", g33])

    @classmethod
    def euclidean(cls, chart: Chart) -> "MetricField":
        return cls.diagonal(chart, "1", "1", "1")

    def component(self, i: int, j: int):
        i, j = min(i, j), max(i, j)
        return self.entries[METRIC_SLOTS.index((i, j))]

    def texts(self) -> list:
        return [to_text(e) for e in self.entries]

    def jets(self, points) -> Tuple[np.ndarray, np.ndarray]:
        points = np.asarray(points, dtype=float)
        slots = [eval_jet(e, points) for e in self.entries]
        batch = points.shape[:-1]
        G = np.empty(batch + (3, 3))
        dG = np.empty(batch + (3, 3, 3))
        for (i, j), jet in zip(METRIC_SLOTS, slots):
            G[..., i, j] = G[..., j, i] = jet.value
            dG[..., i, j, :] = dG[..., j, i, :] = jet.grad
        return G, dG


class _ComponentField(BaseModel):
    chart: Chart
    components: Tuple[Any, Any, Any]

    model_config = ConfigDict(frozen=True)

    @field_validator("components")
    @classmethod
    def check_components(cls, v):
        return check_nodes(v)

    @classmethod
    def from_strings(cls, chart: Chart, texts: Sequence[str]):
        if len(texts) != 3:
            raise ValueError("fields need exactly 3 components")
        return cls(chart=chart, components=tuple(parse(t, chart.coord_names) for t in texts))

    def texts(self) -> list:
        return [to_text(e) for e in self.components]

    def jets(self, points) -> Tuple[np.ndarray, np.ndarray]:
        """Values[..., a] and partials[..., a, k] = d_k (component a)."""
        points = np.asarray(points, dtype=float)
        return stack([eval_jet(e, points) for e in self.components])

    def values(self, points) -> np.ndarray:
        return self.jets(points)[0]


class VectorFieldExpr(_ComponentField):
    """Contravariant components X^i."""


class OneFormField(_ComponentField):
    """Covariant components alpha_i."""


def leading_minors(G: np.ndarray) -> np.ndarray:
    m1 = G[..., 0, 0]
    m2 = G[..., 0, 0] * G[..., 1, 1] - G[..., 0, 1] * G[..., 1, 0]
    m3 = np.linalg.det(G)
    return np.stack([m1, m2, m3], axis=-1)


def spd_mask(G: np.ndarray) -> np.ndarray:
    sym = np.all(np.isclose(G, np.swapaxes(G, -1, -2), rtol=1e-12, atol=1e-14), axis=(-1, -2))
    finite = np.all(np.isfinite(G), axis=(-1, -2))
    with np.errstate(invalid="ignore"):
        positive = np.all(leading_minors(np.where(finite[..., None, None], G, 0.0)) > 0, axis=-1)
    return sym & finite & positive


def failing_minor(G: np.ndarray) -> int:
    """1-based index of the first non-positive leading minor of a single matrix."""
    minors = leading_minors(np.asarray(G))
    for k, value in enumerate(minors, start=1):
        if not value > 0:
            return k
    return 0
