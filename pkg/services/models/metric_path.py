"""
Families G_t of surface metrics, t in [0, 1], and their parabolicity check.

For the 3-metric dt^2 + G_t the slices {t = const} have second fundamental
form -1/2 d_t G_t, so the slice foliation is parabolic exactly where
det d_t G_t vanishes. A path also has to be constant near both ends and on a
boundary set U so it can be glued into a mapping cylinder.
"""

from __future__ import annotations

import logging
import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from core.config import settings
from core.errors import ConfigError, EigenCrossingWarning, NonSPDPath, NotSPD
from schemas.report import CollarResiduals, MetricPathReport
from services.distributions import KernelForm, evaluate
from services.expr import add, call, mul, num, parse, sub
from services.geometry import Chart, OneFormField, sample_grid
from services.geometry.fields import failing_minor
from services.models.product import SurfaceMetric
from utils.jet import unit_step_parts

logger = logging.getLogger(__name__)

Box = Tuple[Tuple[float, float], Tuple[float, float]]

ZERO_DIFFERENCE = 1e-12


@dataclass
class MetricPath(ABC):
    name: str
    chart: Chart
    delta0: float = 0.0
    delta1: float = 0.0
    boundary: Tuple[Box, ...] = ()
    start: Optional[SurfaceMetric] = None
    end: Optional[SurfaceMetric] = None

    def __post_init__(self) -> None:
        if self.delta0 < 0 or self.delta1 < 0 or self.delta0 + self.delta1 >= 1:
            raise ConfigError(f"collar margins ({self.delta0}, {self.delta1}) must be >= 0 and sum below 1")

    @property
    def stages(self) -> int:
        return 0

    @abstractmethod
    def jets(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """G_t[..., 2, 2] and partials [..., a, b, k] with k = 2 the t-direction."""

    def crossing_mask(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(len(points), dtype=bool)

    def ambient(self) -> "PathAmbientMetric":
        return PathAmbientMetric(self)


@dataclass
class PathAmbientMetric:
    """The 3-metric G_t + dt^2 on the path chart."""

    path: MetricPath

    @property
    def chart(self) -> Chart:
        return self.path.chart

    def jets(self, points) -> Tuple[np.ndarray, np.ndarray]:
        points = np.asarray(points, dtype=float)
        G2, dG2 = self.path.jets(points)
        G = np.zeros(points.shape[:-1] + (3, 3))
        dG = np.zeros(points.shape[:-1] + (3, 3, 3))
        G[..., :2, :2] = G2
        G[..., 2, 2] = 1.0
        dG[..., :2, :2, :] = dG2
        return G, dG


@dataclass
class ExpressionMetricPath(MetricPath):
    metric: Optional[SurfaceMetric] = None

    @classmethod
    def from_strings(cls, chart: Chart, texts: Sequence[str], name: str = "expression-path", **kwargs) -> "ExpressionMetricPath":
        return cls(name=name, chart=chart, metric=SurfaceMetric.from_strings(chart, texts), **kwargs)

    @property
    def stages(self) -> int:
        return 1 if self.metric is not None and self.metric.depends_on_fiber() else 0

    def jets(self, points) -> Tuple[np.ndarray, np.ndarray]:
        return self.metric.jets(points)


def straight_line_path(
    G: SurfaceMetric,
    H: SurfaceMetric,
    margins: Tuple[float, float] = (0.0, 0.0),
    reparametrize: bool = False,
) -> ExpressionMetricPath:
    """(1 - tau) G + tau H with tau = t, or a smoothstep in t that is flat on both collars."""
    if G.chart != H.chart:
        raise ConfigError("both ends of a path must live on the same surface chart")
    t = parse(G.chart.coord_names[2], G.chart.coord_names)
    tau = call("smoothstep", num(margins[0]), num(1.0 - margins[1]), t) if reparametrize else t
    entries = tuple(add(mul(sub(num(1.0), tau), g), mul(tau, h)) for g, h in zip(G.entries, H.entries))
    return ExpressionMetricPath(
        name="straight-line" + ("-reparametrized" if reparametrize else ""),
        chart=G.chart,
        delta0=margins[0],
        delta1=margins[1],
        start=G,
        end=H,
        metric=SurfaceMetric(chart=G.chart, entries=entries),
    )


@dataclass
class RankOnePath(MetricPath):
    """
    G_t = G + sum over stages of s(m tau - j) D_c / L, where D = H - G is split
    into eigen-components D_c = mu_c u_c u_c^T (largest eigenvalue first),
    every component is walked in L equal legs and m = L * (number of components).
    Only one stage moves at a time, so d_t G_t has rank one.
    """

    legs: int = 1
    active: Tuple[int, ...] = field(default_factory=tuple)

    @property
    def stages(self) -> int:
        return self.legs * len(self.active)

    def _tau(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        span = 1.0 - self.delta0 - self.delta1
        raw = (t - self.delta0) / span
        inside = (raw > 0) & (raw < 1)
        return np.clip(raw, 0.0, 1.0), np.where(inside, 1.0 / span, 0.0)

    def components(self, points: np.ndarray):
        """Eigenvalues mu[..., c], projectors P[..., c, 2, 2] and their surface partials."""
        G0, dG0 = self.start.jets(points)
        G1, dG1 = self.end.jets(points)
        D, dD = G1 - G0, dG1 - dG0
        mu, U = np.linalg.eigh(D)
        mu, U = mu[..., ::-1], U[..., :, ::-1]
        gap = mu[..., 0] - mu[..., 1]
        safe_gap = np.where(np.abs(gap) > settings.eigen_crossing_gap, gap, np.inf)
        P = np.einsum("...ac,...bc->...cab", U * mu[..., None, :], U)
        dP = np.zeros(P.shape + (3,))
        for c, d, sign in ((0, 1, 1.0), (1, 0, -1.0)):
            u, w = U[..., :, c], U[..., :, d]
            dmu = np.einsum("...a,...abk,...b->...k", u, dD, u)
            coupling = np.einsum("...a,...abk,...b->...k", w, dD, u) / (sign * safe_gap)[..., None]
            du = w[..., :, None] * coupling[..., None, :]
            outer = np.einsum("...a,...b->...ab", u, u)
            dP[..., c, :, :, :] = dmu[..., None, None, :] * outer[..., None] + mu[..., c, None, None, None] * (
                np.einsum("...ak,...b->...abk", du, u) + np.einsum("...a,...bk->...abk", u, du)
            )
        return G0, dG0, mu, P, dP, D

    def jets(self, points) -> Tuple[np.ndarray, np.ndarray]:
        points = np.asarray(points, dtype=float)
        G0, dG0, _, P, dP, _ = self.components(points)
        G = G0.copy()
        dG = dG0.copy()
        dG[..., 2] = 0.0
        if not self.active:
            return G, dG
        tau, dtau = self._tau(points[..., 2])
        m = self.stages
        for leg in range(self.legs):
            for slot, c in enumerate(self.active):
                j = leg * len(self.active) + slot
                s, ds, _ = unit_step_parts(m * tau - j)
                step = P[..., c, :, :] / self.legs
                G = G + s[..., None, None] * step
                dG[..., :2] += s[..., None, None, None] * dP[..., c, :, :, :2] / self.legs
                dG[..., 2] += (ds * m * dtau)[..., None, None] * step
        return G, dG

    def crossing_mask(self, points) -> np.ndarray:
        _, _, mu, _, _, D = self.components(np.asarray(points, dtype=float))
        close = np.abs(mu[..., 0] - mu[..., 1]) < settings.eigen_crossing_gap
        return close & (np.linalg.norm(D, axis=(-1, -2)) > ZERO_DIFFERENCE)


def rank_one_path(
    G: SurfaceMetric,
    H: SurfaceMetric,
    margins: Tuple[float, float] = (0.0, 0.0),
    boundary: Sequence[Box] = (),
    grid: Optional[Sequence[int]] = None,
    max_depth: Optional[int] = None,
    order: Sequence[int] = (0, 1),
) -> RankOnePath:
    """
    Default path from G to H with rank-one t-derivative. SPD is validated on a
    grid; on failure every component is split into twice as many legs, up to
    ``max_depth`` halvings.

    ``order`` walks the eigen-components of H - G (0 = largest eigenvalue).
    Largest first keeps every stage endpoint SPD; the reverse order may need
    subdivision.
    """
    if sorted(order) != [0, 1]:
        raise ConfigError(f"component order {tuple(order)} must be a permutation of (0, 1)")
    if G.chart != H.chart:
        raise ConfigError("both ends of a path must live on the same surface chart")
    grid = tuple(grid or settings.default_grid)
    max_depth = settings.max_path_depth if max_depth is None else max_depth
    points = sample_grid(G.chart, grid)
    base = RankOnePath(
        name="rank-one",
        chart=G.chart,
        delta0=margins[0],
        delta1=margins[1],
        boundary=tuple(boundary),
        start=G,
        end=H,
    )
    _, _, mu, _, _, D = base.components(points)
    scale = 1.0 + np.max(np.abs(G.jets(points)[0]))
    active = tuple(c for c in order if np.max(np.abs(mu[..., c])) > ZERO_DIFFERENCE * scale)
    crossings = int(np.count_nonzero(base.crossing_mask(points)))
    if crossings:
        logger.warning("rank-one path: %d grid points near an eigenvalue crossing", crossings)
        warnings.warn(f"{crossings} points near an eigenvalue crossing", EigenCrossingWarning, stacklevel=2)
    if not active:
        return base
    for depth in range(max_depth + 1):
        path = RankOnePath(**{**base.__dict__, "legs": 2**depth, "active": active})
        values, _ = path.jets(points)
        lowest = np.linalg.eigvalsh(values)[..., 0]
        if np.all(lowest > 0):
            logger.info("rank-one path: %d stages after %d subdivisions", path.stages, depth)
            return path
        logger.debug("rank-one path leaves the SPD cone with %d legs, subdividing", path.legs)
    bad = int(np.argmin(lowest))
    raise NonSPDPath(points[bad, 2], points[bad], max_depth)


def _at_t(points: np.ndarray, t: float) -> np.ndarray:
    shifted = points.copy()
    shifted[:, 2] = t
    return shifted


def _inside(points: np.ndarray, boxes: Sequence[Box]) -> np.ndarray:
    mask = np.zeros(len(points), dtype=bool)
    for (u0, u1), (v0, v1) in boxes:
        mask |= (points[:, 0] >= u0) & (points[:, 0] <= u1) & (points[:, 1] >= v0) & (points[:, 1] <= v1)
    return mask


def _max_diff(A: np.ndarray, B: np.ndarray, mask: Optional[np.ndarray] = None) -> float:
    diff = np.abs(A - B).reshape(len(A), -1).max(axis=-1)
    if mask is not None:
        diff = diff[mask]
    return float(np.max(diff)) if diff.size else 0.0


def verify_metric_path(path: MetricPath, grid: Optional[Sequence[int]] = None, tol: Optional[float] = None) -> MetricPathReport:
    grid = tuple(grid or settings.default_grid)
    tol = settings.parabolic_tol if tol is None else tol
    points = sample_grid(path.chart, grid)
    G, dG = path.jets(points)

    eig = np.linalg.eigvalsh(G)[..., 0]
    if not np.all(eig > 0):
        bad = int(np.argmin(eig))
        G3 = np.eye(3)
        G3[:2, :2] = G[bad]
        raise NotSPD(points[bad], failing_minor(G3))

    dtG = dG[..., 2]
    det_dt = np.abs(dtG[:, 0, 0] * dtG[:, 1, 1] - dtG[:, 0, 1] * dtG[:, 1, 0])
    # a rank-one 2x2 determinant cancels to roundoff of order |d_t G|^2
    det_rel = det_dt / np.maximum(1.0, np.sum(dtG**2, axis=(-1, -2)))
    flagged = path.crossing_mask(points)
    max_det = float(np.max(det_dt[~flagged])) if np.any(~flagged) else 0.0
    residual = float(np.max(det_rel[~flagged])) if np.any(~flagged) else 0.0

    G_first = path.jets(_at_t(points, 0.0))[0]
    G_last = path.jets(_at_t(points, 1.0))[0]
    t = points[:, 2]
    collar = CollarResiduals(
        start=_max_diff(G, G_first, t <= path.delta0),
        end=_max_diff(G, G_last, t >= 1.0 - path.delta1),
        boundary=_max_diff(G, G_first, _inside(points, path.boundary)),
    )
    endpoint = 0.0
    if path.start is not None:
        endpoint = max(endpoint, _max_diff(G_first, path.start.jets(_at_t(points, 0.0))[0]))
    if path.end is not None:
        endpoint = max(endpoint, _max_diff(G_last, path.end.jets(_at_t(points, 1.0))[0]))

    # slices t = const under dt^2 + G_t: B must equal -1/2 d_t G_t in the frame (d/du, d/dv)
    slices = KernelForm(alpha=OneFormField.from_strings(path.chart, ["0", "0", "1"]))
    frame = np.broadcast_to(np.eye(3)[:2], (len(points), 2, 3))
    sample = evaluate(path.ambient(), slices, points, frame=frame)
    ok = sample.valid & ~flagged
    cross = _max_diff(sample.B[ok], -0.5 * dtG[ok]) if np.any(ok) else None

    parabolic = residual <= tol and max(collar.start, collar.end, collar.boundary) <= tol
    report = MetricPathReport(
        path=path.name,
        grid=grid,
        stages=path.stages,
        max_abs_det_dt=max_det,
        det_residual=residual,
        flagged_points=int(np.count_nonzero(flagged)),
        collar=collar,
        spd=True,
        min_eigenvalue=float(np.min(eig)),
        endpoint_error=endpoint,
        B_cross_check=cross,
        parabolic=parabolic,
    )
    logger.info("verified path %s: det residual %.3e, parabolic=%s", path.name, residual, parabolic)
    return report
