"""
Grid sweeps: curvature reports and the mean-curvature integral.
"""

from __future__ import annotations

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from core.config import settings
from core.domain import Character, Classification
from schemas.report import CurvatureReport, FieldStats, IntegralReport, PointRecord
from services.distributions.plane_field import PlaneFieldSample, evaluate
from services.distributions.types import Distribution
from services.geometry import Chart, MetricSource, VectorFieldExpr, quadrature_grid, sample_grid, volume_element
from utils.parallel import pairwise_sum

logger = logging.getLogger(__name__)

WORST_POINTS = 10


def field_stats(values: np.ndarray) -> FieldStats:
    values = values[np.isfinite(values)]
    if values.size == 0:
        return FieldStats()
    return FieldStats(
        min=float(np.min(values)),
        max=float(np.max(values)),
        mean=pairwise_sum(values) / values.size,
        max_abs=float(np.max(np.abs(values))),
    )


def classification_of(K: np.ndarray, tol: float) -> Classification:
    K = K[np.isfinite(K)]
    if K.size == 0:
        return Classification.mixed
    if np.max(np.abs(K)) <= tol:
        return Classification.parabolic
    if np.max(K) <= -tol:
        return Classification.hyperbolic
    if np.min(K) >= tol:
        return Classification.elliptic
    return Classification.mixed


def character_of(frobenius: np.ndarray, contact: np.ndarray, tol: Optional[float] = None) -> Character:
    tol = settings.frobenius_tol if tol is None else tol
    frobenius = frobenius[np.isfinite(frobenius)]
    contact = contact[np.isfinite(contact)]
    if frobenius.size and np.max(np.abs(frobenius)) <= tol:
        return Character.foliation
    if contact.size and np.min(np.abs(contact)) > tol:
        return Character.contact
    return Character.neither


def point_record(sample: PlaneFieldSample, i: int) -> PointRecord:
    return PointRecord(
        point=sample.points[i].tolist(),
        frame=sample.frame[i].tolist(),
        B=sample.B[i].tolist(),
        gram=sample.gram[i].tolist(),
        H=float(sample.H[i]),
        K_e=float(sample.K[i]),
        frobenius_residual=float(sample.frobenius[i]),
        contact_volume=float(sample.contact[i]),
    )


def build_report(
    sample: PlaneFieldSample,
    *,
    target: str,
    chart: str,
    grid: Sequence[int],
    tol: float,
    distribution: str = "default",
    include_records: bool = False,
) -> CurvatureReport:
    valid = np.flatnonzero(sample.valid)
    abs_K = np.abs(sample.K[valid])
    worst = valid[np.argsort(-abs_K, kind="stable")[:WORST_POINTS]]
    B_norm = sample.B_norm
    aggregates = {
        "H": field_stats(sample.H),
        "K_e": field_stats(sample.K),
        "frobenius_residual": field_stats(sample.frobenius),
        "contact_volume": field_stats(sample.contact),
        "B_norm": field_stats(B_norm),
    }
    has_valid = valid.size > 0
    return CurvatureReport(
        target=target,
        chart=chart,
        distribution=distribution,
        grid=tuple(int(c) for c in grid),
        tol=tol,
        points_total=len(sample),
        points_valid=int(valid.size),
        aggregates=aggregates,
        classification=classification_of(sample.K, tol),
        totally_geodesic=has_valid and bool(np.nanmax(B_norm) <= tol),
        minimal=has_valid and bool(np.nanmax(np.abs(sample.H)) <= tol),
        character=character_of(sample.frobenius[valid], sample.contact[valid]),
        worst_points=[point_record(sample, int(i)) for i in worst],
        errors=sample.issues(),
        records=[point_record(sample, int(i)) for i in valid] if include_records else None,
    )


def classify(
    g: MetricSource,
    xi: Distribution,
    chart: Chart,
    grid: Optional[Sequence[int]] = None,
    tol: Optional[float] = None,
    jobs: Optional[int] = None,
    target: Optional[str] = None,
    distribution: str = "default",
    include_records: bool = False,
    frame: Optional[Tuple[VectorFieldExpr, VectorFieldExpr]] = None,
) -> CurvatureReport:
    """Sweep a grid; ``frame`` fixes the vector fields B is reported in (default: the distribution's own frame)."""
    grid = tuple(grid or settings.default_grid)
    tol = settings.parabolic_tol if tol is None else tol
    points = sample_grid(chart, grid)
    values = None if frame is None else np.stack([X.values(points) for X in frame], axis=-2)
    sample = evaluate(g, xi, points, frame=values, jobs=jobs)
    report = build_report(
        sample,
        target=target or chart.name,
        chart=chart.name,
        grid=grid,
        tol=tol,
        distribution=distribution,
        include_records=include_records,
    )
    logger.info(
        "classified %s on %s: %s (%d/%d valid)",
        report.target,
        "x".join(map(str, grid)),
        report.classification.value,
        report.points_valid,
        report.points_total,
    )
    return report


def integral_mean_curvature(
    g: MetricSource,
    xi: Distribution,
    chart: Chart,
    grid: Optional[Sequence[int]] = None,
    compact_support: bool = False,
    jobs: Optional[int] = None,
    target: Optional[str] = None,
) -> IntegralReport:
    """
    Midpoint quadrature of H dV over the chart together with the largest
    pointwise defect of the identity H = div(-n).
    """
    grid = tuple(grid or settings.default_grid)
    points, cell = quadrature_grid(chart, grid, compact_support)
    sample = evaluate(g, xi, points, jobs=jobs)
    if sample.errors:
        first = min(sample.errors)
        raise sample.errors[first]
    vol = volume_element(g, points)
    integral = pairwise_sum(sample.H * vol) * cell
    defect = float(np.max(np.abs(sample.H + sample.div_normal)))
    logger.info("integral of H over %s: %.3e (defect %.3e)", chart.name, integral, defect)
    return IntegralReport(
        target=target or chart.name,
        chart=chart.name,
        grid=grid,
        integral=integral,
        max_defect=defect,
        volume=pairwise_sum(vol) * cell,
    )
