"""
Atlas checks and the annulus-page open book demo.

The demo glues three charts along fixed coordinate changes:

    reeb (r, phi, t), r in [0, 1]
      -- (r + delta, phi, t) on r in [1 - delta, 1] -->
    collar (r, phi, t), r in [1, 1 + 2 eps]
      -- (r, t, phi) on r in [1 + eps, 1 + 2 eps] -->
    product (u, v, s) over the annulus page u in [1 + eps, 1 + 2 eps]

and adds the mapping-cylinder leg for a k-fold Dehn twist of the page.
"""

from __future__ import annotations

import logging
import math
from typing import Dict, Optional, Sequence

import numpy as np

from core.config import settings
from core.errors import ConfigError, OverlapMismatch
from schemas.chart import AtlasDocument, MonodromyDocument, TransitionDocument
from schemas.report import AtlasReport, ChartSummary, OverlapReport
from services.distributions import classify, form_jets
from services.expr import eval_jet, parse
from services.models.base import Model
from services.models.collar import collar_model
from services.models.documents import model_from_document, model_to_document
from services.models.metric_path import rank_one_path, verify_metric_path
from services.models.product import SurfaceMetric, TwistSpec, dehn_twist_pullback, product_fibration, surface_chart
from services.models.reeb import reeb_solid_torus
from services.geometry import sample_grid
from utils.jet import stack

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
OVERLAP_GRID = (8, 8, 8)
CHART_GRID = (24, 8, 8)
PATH_GRID = (24, 16, 9)


def _map_jets(texts: Sequence[str], coords: Sequence[str], points: np.ndarray):
    return stack([eval_jet(parse(t, coords), points) for t in texts])


def _unit_rows(A: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(A, axis=-1, keepdims=True)
    return A / np.where(norm > 0, norm, 1.0)


def check_overlap(tr: TransitionDocument, source: Model, target: Model, grid: Optional[Sequence[int]] = None) -> OverlapReport:
    """
    Metric mismatch |g_A - J^T g_B(F) J|, leaf tangency |a x J^T b| for the
    normalized foliation forms, and the round trip |F^-1(F(p)) - p|.
    """
    grid = tuple(grid or OVERLAP_GRID)
    box = source.chart.restricted(tr.overlap, name=tr.name)
    points = sample_grid(box, grid)
    F, J = _map_jets(tr.forward, source.chart.coord_names, points)

    lows = np.array([lo for lo, _ in target.chart.domain])
    highs = np.array([hi for _, hi in target.chart.domain])
    slack = 1e-12 * (1.0 + np.abs(highs - lows))
    if np.any(F < lows - slack) or np.any(F > highs + slack):
        raise ConfigError(f"transition {tr.name} leaves chart {target.model_id} on its overlap box")

    G_src, _ = source.metric.jets(points)
    G_dst, _ = target.metric.jets(F)
    pulled = np.einsum("...ak,...ab,...bl->...kl", J, G_dst, J)
    metric_mismatch = float(np.max(np.abs(G_src - pulled)))

    A_src = form_jets(source.foliation, points)[0]
    A_dst = np.einsum("...ak,...a->...k", J, form_jets(target.foliation, F)[0])
    tangency = float(np.max(np.linalg.norm(np.cross(_unit_rows(A_src), _unit_rows(A_dst)), axis=-1)))

    back, _ = _map_jets(tr.inverse, target.chart.coord_names, F)
    round_trip = float(np.max(np.abs(back - points)))
    logger.debug("overlap %s: metric %.2e, tangency %.2e, round trip %.2e", tr.name, metric_mismatch, tangency, round_trip)
    return OverlapReport(
        name=tr.name,
        points=len(points),
        metric_mismatch=metric_mismatch,
        leaf_tangency=tangency,
        round_trip=round_trip,
    )


def check_monodromy(m: MonodromyDocument, grid: Optional[Sequence[int]] = None, tol: Optional[float] = None):
    """Rank-one path from the flat page metric to its twist pullback, verified."""
    page = surface_chart(m.u, m.v, periodic=(False, True), name="page")
    G = SurfaceMetric.identity(page)
    H = dehn_twist_pullback(G, TwistSpec(a=m.a, b=m.b, k=m.k))
    boundary = ((tuple(m.u), tuple(m.v)),) if m.k == 0 else (
        ((m.u[0], m.a), tuple(m.v)),
        ((m.b, m.u[1]), tuple(m.v)),
    )
    grid = tuple(grid or PATH_GRID)
    path = rank_one_path(G, H, margins=m.margins, boundary=boundary, grid=grid)
    return verify_metric_path(path, grid=grid, tol=tol)


def check_atlas(
    doc: AtlasDocument,
    grid: Optional[Sequence[int]] = None,
    tol: Optional[float] = None,
    overlap_tol: Optional[float] = None,
    jobs: Optional[int] = None,
    strict: bool = True,
) -> AtlasReport:
    tol = settings.parabolic_tol if tol is None else tol
    overlap_tol = settings.overlap_tol if overlap_tol is None else overlap_tol
    models: Dict[str, Model] = {c.model_id: model_from_document(c) for c in doc.charts}

    charts = []
    for model_id, model in models.items():
        report = classify(model.metric, model.foliation, model.chart, grid=grid or CHART_GRID, tol=tol, jobs=jobs, target=model_id)
        charts.append(
            ChartSummary(
                name=model_id,
                classification=report.classification,
                max_abs_K=report.aggregates["K_e"].max_abs or 0.0,
                totally_geodesic=report.totally_geodesic,
            )
        )

    overlaps = []
    for tr in doc.transitions:
        overlap = check_overlap(tr, models[tr.source], models[tr.target])
        worst = max(overlap.metric_mismatch, overlap.leaf_tangency, overlap.round_trip)
        if strict and worst > overlap_tol:
            raise OverlapMismatch(tr.name, worst, overlap_tol)
        overlaps.append(overlap)

    monodromy = check_monodromy(doc.monodromy, tol=tol) if doc.monodromy else None
    logger.info("checked atlas %s: %d charts, %d overlaps", doc.name, len(charts), len(overlaps))
    return AtlasReport(
        charts=charts,
        overlaps=overlaps,
        monodromy=monodromy,
        gluing_error=monodromy.endpoint_error if monodromy else None,
        tol=overlap_tol,
    )


def open_book_document(k: int = 1, epsilon: float = 0.2, delta: float = 0.1) -> AtlasDocument:
    if not 0 < delta < 1.0 / 3.0:
        raise ConfigError(f"reeb overlap width must lie in (0, 1/3), got {delta}")
    if not 0 < delta <= epsilon / 2.0:
        raise ConfigError("the reeb overlap must end before the collar starts turning")
    lo, hi = 1.0 + epsilon, 1.0 + 2.0 * epsilon
    page = surface_chart((lo, hi), (0.0, TWO_PI), periodic=(False, True), name="product", coord_names=("u", "v", "s"))
    product = product_fibration(SurfaceMetric.identity(page), model_id="product")
    models = [reeb_solid_torus(), collar_model(epsilon), product]
    width = hi - lo
    return AtlasDocument(
        name="open-book",
        charts=[model_to_document(m) for m in models],
        transitions=[
            TransitionDocument(
                name="reeb->collar",
                source="reeb",
                target="collar",
                forward=(f"r + {delta!r}", "phi", "t"),
                inverse=(f"r - {delta!r}", "phi", "t"),
                overlap=((1.0 - delta, 1.0), (0.0, TWO_PI), (0.0, TWO_PI)),
            ),
            TransitionDocument(
                name="collar->product",
                source="collar",
                target="product",
                forward=("r", "t", "phi"),
                inverse=("u", "s", "v"),
                overlap=((lo, hi), (0.0, TWO_PI), (0.0, TWO_PI)),
            ),
        ],
        monodromy=MonodromyDocument(
            u=(lo, hi),
            v=(0.0, TWO_PI),
            a=lo + 0.25 * width,
            b=lo + 0.75 * width,
            k=k,
        ),
    )


def assemble_open_book_demo(k: int = 1, epsilon: float = 0.2, delta: float = 0.1, jobs: Optional[int] = None) -> AtlasReport:
    return check_atlas(open_book_document(k, epsilon, delta), jobs=jobs)
