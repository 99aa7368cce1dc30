"""
Surface metrics, product fibrations over the circle and Dehn-twist pullbacks.

A surface chart is an ordinary three-coordinate chart (u, v, t) whose last
axis is either the path parameter t in [0, 1] or the circle fiber.
"""

from __future__ import annotations

import logging
import math
from typing import Any, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from core.config import settings
from core.errors import ConfigError, DomainError, NotSPD
from services.distributions import KernelForm
from services.expr import add, call, depends_on, eval_jet, mul, num, parse, substitute, to_text
from services.geometry import Chart, MetricField, OneFormField, VectorFieldExpr, sample_grid
from services.geometry.fields import check_nodes, failing_minor, spd_mask
from services.models.base import Model
from utils.jet import smoothstep

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


def surface_chart(
    u: Tuple[float, float],
    v: Tuple[float, float],
    periodic: Tuple[bool, bool] = (False, True),
    name: str = "page",
    coord_names: Tuple[str, str, str] = ("u", "v", "t"),
    fiber: Optional[Tuple[float, float]] = None,
) -> Chart:
    """Surface coordinates plus a third axis: [0, 1] for paths, or a periodic fiber."""
    third = fiber or (0.0, 1.0)
    return Chart(
        name=name,
        coord_names=coord_names,
        domain=(tuple(u), tuple(v), tuple(third)),
        periodic=(periodic[0], periodic[1], fiber is not None),
    )


def with_fiber(chart: Chart, fiber: Tuple[float, float] = (0.0, TWO_PI), name: Optional[str] = None) -> Chart:
    return chart.model_copy(
        update={
            "domain": (chart.domain[0], chart.domain[1], tuple(fiber)),
            "periodic": (chart.periodic[0], chart.periodic[1], True),
            "name": name or chart.name,
        }
    )


class SurfaceMetric(BaseModel):
    """2x2 symmetric metric (g11, g12, g22) in the first two coordinates of a surface chart."""

    chart: Chart
    entries: Tuple[Any, Any, Any]

    model_config = ConfigDict(frozen=True)

    @field_validator("entries")
    @classmethod
    def check_entries(cls, v):
        return check_nodes(v)

    @classmethod
    def from_strings(cls, chart: Chart, texts: Sequence[str]) -> "SurfaceMetric":
        if len(texts) != 3:
            raise ValueError("surface metric needs entries g11, g12, g22")
        return cls(chart=chart, entries=tuple(parse(t, chart.coord_names) for t in texts))

    @classmethod
    def identity(cls, chart: Chart) -> "SurfaceMetric":
        return cls.from_strings(chart, ["1", "0", "1"])

    def texts(self) -> list:
        return [to_text(e) for e in self.entries]

    def depends_on_fiber(self) -> bool:
        return any(depends_on(e, 2) for e in self.entries)

    def jets(self, points) -> Tuple[np.ndarray, np.ndarray]:
        """G[..., 2, 2] and dG[..., a, b, k] over all three chart coordinates."""
        points = np.asarray(points, dtype=float)
        g11, g12, g22 = (eval_jet(e, points) for e in self.entries)
        G = np.empty(points.shape[:-1] + (2, 2))
        dG = np.empty(points.shape[:-1] + (2, 2, 3))
        G[..., 0, 0], G[..., 0, 1], G[..., 1, 0], G[..., 1, 1] = g11.value, g12.value, g12.value, g22.value
        dG[..., 0, 0, :], dG[..., 0, 1, :], dG[..., 1, 0, :], dG[..., 1, 1, :] = g11.grad, g12.grad, g12.grad, g22.grad
        return G, dG

    def as_block(self, fiber: str = "1") -> MetricField:
        """The 3-metric G + (fiber) dt^2 on the same chart."""
        g11, g12, g22 = self.texts()
        return MetricField.from_strings(self.chart, [g11, g12, "0", g22, "0", fiber])


def check_spd(metric: SurfaceMetric, grid: Optional[Sequence[int]] = None) -> None:
    grid = grid or settings.default_grid
    points = sample_grid(metric.chart, grid)
    G, _ = metric.jets(points)
    G3 = np.zeros(G.shape[:-2] + (3, 3))
    G3[..., :2, :2] = G
    G3[..., 2, 2] = 1.0
    ok = spd_mask(G3)
    if not np.all(ok):
        bad = int(np.flatnonzero(~ok)[0])
        raise NotSPD(points[bad], failing_minor(G3[bad]))


def product_fibration(G: SurfaceMetric, fiber: Tuple[float, float] = (0.0, TWO_PI), model_id: str = "product") -> Model:
    """dt^2 + G on surface x circle, foliated by the slices surface x {t}."""
    if G.depends_on_fiber():
        raise ConfigError("a product metric cannot depend on the fiber coordinate")
    chart = with_fiber(G.chart, fiber, name=model_id)
    surface = G.model_copy(update={"chart": chart})
    check_spd(surface)
    alpha = OneFormField.from_strings(chart, ["0", "0", "1"])
    Du = VectorFieldExpr.from_strings(chart, ["1", "0", "0"])
    Dv = VectorFieldExpr.from_strings(chart, ["0", "1", "0"])
    return Model(
        model_id=model_id,
        chart=chart,
        metric=surface.as_block(),
        distributions={"foliation": KernelForm(alpha=alpha)},
        frames={"slice": (Du, Dv)},
        named_frames={"foliation": "slice"},
    )


class TwistSpec(BaseModel):
    """phi(r, theta) = (r, theta + 2 pi k s(r)) with s = smoothstep(a, b, r)."""

    a: float
    b: float
    k: int = 1

    model_config = ConfigDict(frozen=True)

    def displacement(self, r):
        return TWO_PI * self.k * smoothstep(self.a, self.b, r)

    def apply(self, points: np.ndarray) -> np.ndarray:
        points = np.array(points, dtype=float)
        points[..., 1] += self.displacement(points[..., 0])
        return points


def dehn_twist_pullback(G: SurfaceMetric, tw: TwistSpec) -> SurfaceMetric:
    """
    H = Dphi^T G(phi) Dphi. With c = 2 pi k s'(r) and r the first surface axis:
    H11 = g11 + 2c g12 + c^2 g22, H12 = g12 + c g22, H22 = g22, all evaluated at phi(p).
    """
    lo, hi = G.chart.domain[0]
    if not (tw.a < tw.b and lo <= tw.a and tw.b <= hi):
        raise DomainError("dehn_twist_pullback", [tw.a, tw.b])
    if tw.k == 0:
        return G
    r_name, theta_name = G.chart.coord_names[0], G.chart.coord_names[1]
    r = parse(r_name, G.chart.coord_names)
    theta = parse(theta_name, G.chart.coord_names)
    scale = num(TWO_PI * tw.k)
    shifted = add(theta, mul(scale, call("smoothstep", num(tw.a), num(tw.b), r)))
    c = mul(scale, call("dsmoothstep", num(tw.a), num(tw.b), r))
    g11, g12, g22 = (substitute(e, {theta_name: shifted}) for e in G.entries)
    h11 = add(add(g11, mul(mul(num(2.0), c), g12)), mul(mul(c, c), g22))
    h12 = add(g12, mul(c, g22))
    logger.debug("pulled back %s by a %d-fold twist on [%s, %s]", G.chart.name, tw.k, tw.a, tw.b)
    return SurfaceMetric(chart=G.chart, entries=(h11, h12, g22))
